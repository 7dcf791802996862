//! Positive-existential formulas over `L_z = {0, 1, z, +, ·, =}`.
//!
//! The core AST carries exactly that signature. Integer numerals and `t^e`
//! exist only in the concrete syntax: a numeral `n ≥ 2` expands by binary
//! Horner, `n = 2m + b ↦ (1+1)·⟨m⟩ + b`, and `t^e` to a left-nested product
//! of `e` copies of `t`. The printer recognizes both shapes again, so
//! `parse(print(f)) == f` holds structurally.
//!
//! Concrete grammar:
//!
//! ```text
//! formula := 'E' var '.' formula | disj
//! disj    := conj ('|' conj)*
//! conj    := atom ('&' atom)*
//! atom    := term '=' term | '(' formula ')'
//! term    := factor ('+' factor)*
//! factor  := base ('*' base)*
//! base    := '0' | '1' | 'z' | numeral | var | base '^' numeral | '(' term ')'
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::mpoly::{MPoly, Monomial};
use crate::polyring::{parse_rational, PolyError, QuintAlgebraElem, RatPoly};

const NOT_POSITIVE: &str = "not in the positive existential language";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: `{token}` is {}", NOT_POSITIVE)]
    NotPositive {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("incomparable algebras: quint bases {0} and {1}")]
    IncomparableAlgebras(String, String),
    #[error("witness file line {line}: {msg}")]
    Witness { line: usize, msg: String },
}

impl FormulaError {
    /// Usage-level errors (bad input text) as opposed to evaluation errors.
    pub fn is_syntax(&self) -> bool {
        matches!(
            self,
            FormulaError::Syntax { .. } | FormulaError::NotPositive { .. } | FormulaError::Witness { .. }
        )
    }
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Z,
    Var(String),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    fn two() -> Term {
        Term::add(Term::One, Term::One)
    }

    /// The binary-Horner expansion of a nonnegative integer.
    pub fn numeral(n: &BigUint) -> Term {
        if n.is_zero() {
            return Term::Zero;
        }
        if n.is_one() {
            return Term::One;
        }
        let half = Term::mul(Term::two(), Term::numeral(&(n >> 1u32)));
        if n.bit(0) {
            Term::add(half, Term::One)
        } else {
            half
        }
    }

    pub fn numeral_u64(n: u64) -> Term {
        Term::numeral(&BigUint::from(n))
    }

    /// Inverse of [`Term::numeral`]; `None` unless the term has exactly that shape.
    pub fn numeral_value(&self) -> Option<BigUint> {
        fn doubled(t: &Term) -> Option<BigUint> {
            match t {
                Term::Mul(l, r) if **l == Term::two() => {
                    let m = r.numeral_value()?;
                    (!m.is_zero()).then(|| m << 1u32)
                }
                _ => None,
            }
        }
        match self {
            Term::Zero => Some(BigUint::zero()),
            Term::One => Some(BigUint::one()),
            Term::Mul(..) => doubled(self),
            Term::Add(l, r) if **r == Term::One => doubled(l).map(|v| v + 1u32),
            _ => None,
        }
    }

    /// `e`-fold left-nested product; `t^0 = 1`.
    pub fn pow(t: &Term, e: u32) -> Term {
        if e == 0 {
            return Term::One;
        }
        (1..e).fold(t.clone(), |acc, _| Term::mul(acc, t.clone()))
    }

    /// Left-nested sum; the empty sum is `0`.
    pub fn sum(items: impl IntoIterator<Item = Term>) -> Term {
        items
            .into_iter()
            .reduce(Term::add)
            .unwrap_or(Term::Zero)
    }

    /// Left-nested product; the empty product is `1`.
    pub fn product(items: impl IntoIterator<Item = Term>) -> Term {
        items
            .into_iter()
            .reduce(Term::mul)
            .unwrap_or(Term::One)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Add(a, b) | Term::Mul(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }

    /// Expansion into a signed multivariate polynomial (`z` becomes the
    /// variable named `z`).
    pub fn to_mpoly(&self) -> MPoly {
        match self {
            Term::Zero => MPoly::zero(),
            Term::One => MPoly::constant(1),
            Term::Z => MPoly::var("z"),
            Term::Var(v) => MPoly::var(v),
            Term::Add(a, b) => a.to_mpoly().add(&b.to_mpoly()),
            Term::Mul(a, b) => a.to_mpoly().mul(&b.to_mpoly()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    /// `0 = 0`.
    pub fn truth() -> Formula {
        Formula::Eq(Term::Zero, Term::Zero)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; the empty conjunction is `0 = 0`.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::truth)
    }

    /// `∃v₁ ∃v₂ … body`, outermost first.
    pub fn exists_all(vars: &[String], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v, acc))
    }

    /// Variables bound by the leading quantifier prefix, outermost first,
    /// and the remaining matrix.
    pub fn split_prefix(&self) -> (Vec<&str>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::Exists(v, b) = cur {
            vars.push(v.as_str());
            cur = b;
        }
        (vars, cur)
    }

    /// Every existentially bound variable, in order of appearance.
    pub fn bound_vars(&self) -> Vec<String> {
        fn go(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Eq(..) => {}
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Exists(v, b) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Eq(a, b) => {
                let mut s = BTreeSet::new();
                a.collect_vars(&mut s);
                b.collect_vars(&mut s);
                s
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Formula::Exists(v, b) => {
                let mut s = b.free_vars();
                s.remove(v);
                s
            }
        }
    }

    /// The equality atoms, left to right.
    pub fn atoms(&self) -> Vec<&Formula> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Eq(..) => out.push(f),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Exists(_, b) => go(b, out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, b) => 1 + b.size(),
        }
    }

    pub fn contains_or(&self) -> bool {
        match self {
            Formula::Eq(..) => false,
            Formula::Or(..) => true,
            Formula::And(a, b) => a.contains_or() || b.contains_or(),
            Formula::Exists(_, b) => b.contains_or(),
        }
    }
}

pub fn is_valid_var(name: &str) -> bool {
    let mut cs = name.chars();
    let head_ok = cs
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "z" | "E" | "forall")
}

/// Structural audit of an emitted sentence: closed, well-named variables and
/// a faithful round trip through the concrete syntax.
pub fn audit_sentence(f: &Formula) -> Vec<String> {
    let mut problems = Vec::new();
    let free = f.free_vars();
    if !free.is_empty() {
        problems.push(format!("free variables: {free:?}"));
    }
    let mut names = f.bound_vars();
    names.extend(free);
    for v in names.iter().filter(|v| !is_valid_var(v)) {
        problems.push(format!("invalid variable name `{v}`"));
    }
    match parse(&print(f)) {
        Ok(g) if g == *f => {}
        Ok(_) => problems.push("print/parse round trip changed the AST".into()),
        Err(e) => problems.push(format!("printed form does not parse: {e}")),
    }
    problems
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum TermCtx {
    Sum,
    Factor,
    Base,
}

fn mul_spine(t: &Term) -> Vec<&Term> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Mul(l, r) if cur == t || cur.numeral_value().is_none() => {
                items.push(&**r);
                cur = l;
            }
            _ => {
                items.push(cur);
                break;
            }
        }
    }
    items.reverse();
    items
}

fn write_term(t: &Term, ctx: TermCtx, out: &mut String) {
    if let Some(n) = t.numeral_value() {
        out.push_str(&n.to_string());
        return;
    }
    match t {
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Z => out.push('z'),
        Term::Var(v) => out.push_str(v),
        Term::Add(a, b) => {
            if ctx != TermCtx::Sum {
                out.push('(');
            }
            write_term(a, TermCtx::Sum, out);
            out.push_str(" + ");
            write_term(b, TermCtx::Factor, out);
            if ctx != TermCtx::Sum {
                out.push(')');
            }
        }
        Term::Mul(..) => {
            if ctx == TermCtx::Base {
                out.push('(');
            }
            let items = mul_spine(t);
            let run = items.iter().take_while(|x| **x == items[0]).count();
            let rest = if run >= 3 {
                write_term(items[0], TermCtx::Base, out);
                out.push('^');
                out.push_str(&run.to_string());
                &items[run..]
            } else {
                write_term(items[0], TermCtx::Base, out);
                &items[1..]
            };
            for x in rest {
                out.push('*');
                write_term(x, TermCtx::Base, out);
            }
            if ctx == TermCtx::Base {
                out.push(')');
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FormCtx {
    Top,
    DisjLeft,
    DisjRight,
    ConjLeft,
    ConjRight,
}

fn write_formula(f: &Formula, ctx: FormCtx, out: &mut String) {
    let bare = match f {
        Formula::Eq(..) => true,
        Formula::Exists(..) => ctx == FormCtx::Top,
        Formula::Or(..) => matches!(ctx, FormCtx::Top | FormCtx::DisjLeft),
        Formula::And(..) => ctx != FormCtx::ConjRight,
    };
    if !bare {
        out.push('(');
        write_formula(f, FormCtx::Top, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Eq(a, b) => {
            write_term(a, TermCtx::Sum, out);
            out.push_str(" = ");
            write_term(b, TermCtx::Sum, out);
        }
        Formula::And(a, b) => {
            write_formula(a, FormCtx::ConjLeft, out);
            out.push_str(" & ");
            write_formula(b, FormCtx::ConjRight, out);
        }
        Formula::Or(a, b) => {
            write_formula(a, FormCtx::DisjLeft, out);
            out.push_str(" | ");
            write_formula(b, FormCtx::DisjRight, out);
        }
        Formula::Exists(v, b) => {
            out.push_str("E ");
            out.push_str(v);
            out.push_str(" . ");
            write_formula(b, FormCtx::Top, out);
        }
    }
}

/// Canonical text form.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, FormCtx::Top, &mut out);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, TermCtx::Sum, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigUint),
    Z,
    Exists,
    Plus,
    Star,
    Caret,
    Equals,
    LParen,
    RParen,
    Amp,
    Bar,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Num(n) => write!(f, "numeral `{n}`"),
            Tok::Z => write!(f, "`z`"),
            Tok::Exists => write!(f, "`E`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, FormulaError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let single = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                col += 1;
                i += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '=' => Some(Tok::Equals),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '.' => Some(Tok::Dot),
            '-' | '!' | '~' | '¬' | '∀' | '→' | '−' => {
                return Err(FormulaError::NotPositive {
                    line: l0,
                    col: c0,
                    token: c.to_string(),
                })
            }
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Num(s.parse().expect("digits")),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let tok = match s.as_str() {
                "z" => Tok::Z,
                "E" => Tok::Exists,
                "forall" => {
                    return Err(FormulaError::NotPositive {
                        line: l0,
                        col: c0,
                        token: s,
                    })
                }
                _ => Tok::Ident(s),
            };
            out.push(Token { tok, line: l0, col: c0 });
        } else {
            return Err(FormulaError::Syntax {
                line: l0,
                col: c0,
                msg: format!("unexpected character `{c}`"),
            });
        }
        col += i - start;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const MAX_EXPONENT: u32 = 10_000;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, (usize, FormulaError)>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err((
            self.pos,
            FormulaError::Syntax {
                line: t.line,
                col: t.col,
                msg: msg.into(),
            },
        ))
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let got = self.peek().clone();
            self.fail(format!("expected {want}, found {got}"))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Exists {
            self.bump();
            let v = match self.bump() {
                Tok::Ident(v) => v,
                other => {
                    self.pos -= 1;
                    return self.fail(format!("expected a variable after `E`, found {other}"));
                }
            };
            self.expect(Tok::Dot)?;
            let body = self.formula()?;
            return Ok(Formula::exists(&v, body));
        }
        let mut acc = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn equation(&mut self) -> PResult<Formula> {
        let a = self.term()?;
        self.expect(Tok::Equals)?;
        let b = self.term()?;
        Ok(Formula::eq(a, b))
    }

    fn atom(&mut self) -> PResult<Formula> {
        if *self.peek() != Tok::LParen {
            return self.equation();
        }
        let save = self.pos;
        let first = match self.equation() {
            Ok(f) => return Ok(f),
            Err(e) => e,
        };
        self.pos = save;
        self.bump();
        let second = self.formula().and_then(|f| {
            self.expect(Tok::RParen)?;
            Ok(f)
        });
        second.map_err(|e| if e.0 >= first.0 { e } else { first })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = Term::add(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<Term> {
        let mut acc = self.base()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Term::mul(acc, self.base()?);
        }
        Ok(acc)
    }

    fn base(&mut self) -> PResult<Term> {
        let mut b = match self.bump() {
            Tok::Num(n) => Term::numeral(&n),
            Tok::Z => Term::Z,
            Tok::Ident(v) => Term::Var(v),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                t
            }
            other => {
                self.pos -= 1;
                return self.fail(format!("expected a term, found {other}"));
            }
        };
        while *self.peek() == Tok::Caret {
            self.bump();
            let e = match self.bump() {
                Tok::Num(n) => n,
                other => {
                    self.pos -= 1;
                    return self.fail(format!("expected an exponent numeral, found {other}"));
                }
            };
            match e.to_u32().filter(|&e| e <= MAX_EXPONENT) {
                Some(e) => b = Term::pow(&b, e),
                None => {
                    self.pos -= 1;
                    return self.fail(format!("exponent {e} exceeds {MAX_EXPONENT}"));
                }
            }
        }
        Ok(b)
    }
}

/// Parses a formula in the concrete grammar.
pub fn parse(src: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let f = p.formula().map_err(|e| e.1)?;
    if *p.peek() != Tok::Eof {
        let got = p.peek().clone();
        return p.fail(format!("unexpected {got}")).map_err(|e| e.1);
    }
    Ok(f)
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term, FormulaError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.term().map_err(|e| e.1)?;
    if *p.peek() != Tok::Eof {
        let got = p.peek().clone();
        return p.fail(format!("unexpected {got}")).map_err(|e| e.1);
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Ground evaluation
// ---------------------------------------------------------------------------

/// A ring element: a rational polynomial, or a polynomial with coefficients
/// in a quintic quotient algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Poly(RatPoly),
    Quint(QuintAlgebraElem),
}

impl Element {
    pub fn constant(c: BigRational) -> Self {
        Element::Poly(RatPoly::constant(c))
    }

    pub fn as_poly(&self) -> Option<&RatPoly> {
        match self {
            Element::Poly(p) => Some(p),
            Element::Quint(_) => None,
        }
    }

    fn mismatch(e: PolyError) -> FormulaError {
        match e {
            PolyError::AlgebraMismatch(a, b) => FormulaError::IncomparableAlgebras(
                crate::polyring::format_rational(&a),
                crate::polyring::format_rational(&b),
            ),
            other => FormulaError::IncomparableAlgebras(other.to_string(), String::new()),
        }
    }

    fn binop(
        &self,
        other: &Element,
        poly: impl Fn(&RatPoly, &RatPoly) -> RatPoly,
        quint: impl Fn(&QuintAlgebraElem, &QuintAlgebraElem) -> Result<QuintAlgebraElem, PolyError>,
    ) -> Result<Element, FormulaError> {
        use Element::*;
        let lift = |p: &RatPoly, base: &BigRational| QuintAlgebraElem::scalar(base.clone(), p.clone());
        Ok(match (self, other) {
            (Poly(a), Poly(b)) => Poly(poly(a, b)),
            (Poly(a), Quint(b)) => Quint(quint(&lift(a, b.base()), b).map_err(Self::mismatch)?),
            (Quint(a), Poly(b)) => Quint(quint(a, &lift(b, a.base())).map_err(Self::mismatch)?),
            (Quint(a), Quint(b)) => Quint(quint(a, b).map_err(Self::mismatch)?),
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element, FormulaError> {
        self.binop(other, |a, b| a + b, |a, b| a.add(b))
    }

    pub fn mul(&self, other: &Element) -> Result<Element, FormulaError> {
        self.binop(other, |a, b| a * b, |a, b| a.mul(b))
    }

    /// Exact equality; comparing elements of two different quintic algebras
    /// is an error.
    pub fn equals(&self, other: &Element) -> Result<bool, FormulaError> {
        use Element::*;
        Ok(match (self, other) {
            (Poly(a), Poly(b)) => a == b,
            (Poly(a), Quint(b)) | (Quint(b), Poly(a)) => b.as_scalar() == Some(a),
            (Quint(a), Quint(b)) => {
                if a.base() != b.base() {
                    return Err(Self::mismatch(PolyError::AlgebraMismatch(
                        a.base().clone(),
                        b.base().clone(),
                    )));
                }
                a.coords() == b.coords()
            }
        })
    }

    /// Adds one to the element (used for witness mutation tests).
    pub fn plus_one(&self) -> Element {
        self.add(&Element::Poly(RatPoly::one())).expect("scalar lift never fails")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Poly(p) => write!(f, "{p}"),
            Element::Quint(q) => write!(f, "{q}"),
        }
    }
}

/// Variable name to ring element.
pub type Assignment = BTreeMap<String, Element>;

pub fn eval_term(t: &Term, a: &Assignment) -> Result<Element, FormulaError> {
    match t {
        Term::Zero => Ok(Element::Poly(RatPoly::zero())),
        Term::One => Ok(Element::Poly(RatPoly::one())),
        Term::Z => Ok(Element::Poly(RatPoly::z())),
        Term::Var(v) => a.get(v).cloned().ok_or_else(|| FormulaError::Unbound(v.clone())),
        Term::Add(x, y) => eval_term(x, a)?.add(&eval_term(y, a)?),
        Term::Mul(x, y) => {
            if let Some(n) = t.numeral_value() {
                return Ok(Element::Poly(RatPoly::from_int(BigInt::from(n))));
            }
            eval_term(x, a)?.mul(&eval_term(y, a)?)
        }
    }
}

/// Evaluates a formula whose quantified variables are all supplied by the
/// assignment: each `∃v` is discharged by the value bound to `v`.
pub fn eval_ground(f: &Formula, a: &Assignment) -> Result<bool, FormulaError> {
    match f {
        Formula::Eq(l, r) => eval_term(l, a)?.equals(&eval_term(r, a)?),
        Formula::And(l, r) => Ok(eval_ground(l, a)? && eval_ground(r, a)?),
        Formula::Or(l, r) => Ok(eval_ground(l, a)? || eval_ground(r, a)?),
        Formula::Exists(v, body) => {
            if !a.contains_key(v) {
                return Err(FormulaError::Unbound(v.clone()));
            }
            eval_ground(body, a)
        }
    }
}

// ---------------------------------------------------------------------------
// Witness files
// ---------------------------------------------------------------------------

/// Parses `name = [poly]` and `name = quint(t, [c0, …, c4])` lines; `#`
/// starts a comment.
pub fn parse_assignment(text: &str) -> Result<Assignment, FormulaError> {
    let mut out = Assignment::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| FormulaError::Witness { line: i + 1, msg };
        let (name, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `name = value`".into()))?;
        let name = name.trim();
        if !is_valid_var(name) {
            return Err(err(format!("invalid variable name `{name}`")));
        }
        let value = value.trim();
        let elem = if let Some(inner) = value.strip_prefix("quint(").and_then(|v| v.strip_suffix(')')) {
            let (t, list) = inner
                .split_once(',')
                .ok_or_else(|| err("expected `quint(t, [c0, ..., c4])`".into()))?;
            let t = parse_rational(t).map_err(|e| err(e.to_string()))?;
            let cs: RatPoly = list.parse().map_err(|e: PolyError| err(e.to_string()))?;
            if cs.degree() > 4 {
                return Err(err("a quint element has at most 5 coordinates".into()));
            }
            let coords: [BigRational; 5] = std::array::from_fn(|j| cs.coeff(j));
            Element::Quint(QuintAlgebraElem::new(t, coords))
        } else {
            Element::Poly(value.parse().map_err(|e: PolyError| err(e.to_string()))?)
        };
        if out.insert(name.to_string(), elem).is_some() {
            return Err(err(format!("duplicate binding for `{name}`")));
        }
    }
    Ok(out)
}

/// Serializes an assignment in the witness file format.
pub fn format_assignment(a: &Assignment) -> String {
    a.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

// ---------------------------------------------------------------------------
// Sign splitting
// ---------------------------------------------------------------------------

fn monomial_key(m: &Monomial) -> (u32, Vec<(String, u32)>, u32) {
    let unknowns: Vec<(String, u32)> = m
        .iter()
        .filter(|(v, _)| v.as_str() != "z")
        .map(|(v, e)| (v.clone(), *e))
        .collect();
    let deg = unknowns.iter().map(|(_, e)| e).sum();
    (deg, unknowns, m.get("z").copied().unwrap_or(0))
}

/// The product `c · z^a · v₁^{e₁} ⋯` as a left-nested term (`c > 0`).
pub fn monomial_term(c: &BigInt, m: &Monomial) -> Term {
    let mut factors = Vec::new();
    if !c.is_one() || m.is_empty() {
        factors.push(Term::numeral(&c.magnitude().clone()));
    }
    if let Some(&e) = m.get("z") {
        factors.extend(std::iter::repeat_n(Term::Z, e as usize));
    }
    for (v, e) in m.iter().filter(|(v, _)| v.as_str() != "z") {
        factors.extend(std::iter::repeat_n(Term::var(v), *e as usize));
    }
    Term::product(factors)
}

fn side_term(mut monos: Vec<(Monomial, BigInt)>) -> Term {
    monos.sort_by_key(|(m, _)| monomial_key(m));
    Term::sum(monos.iter().map(|(m, c)| monomial_term(c, m)))
}

/// Rewrites a signed identity `lhs = rhs` as a subtraction-free atom:
/// negative monomials of either side move to the other side. Like terms are
/// combined within a side but never across sides.
pub fn positive_rewrite(lhs: &MPoly, rhs: &MPoly) -> Formula {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (m, c) in lhs.terms() {
        if c.is_negative() {
            right.push((m.clone(), -c));
        } else {
            left.push((m.clone(), c.clone()));
        }
    }
    for (m, c) in rhs.terms() {
        if c.is_negative() {
            left.push((m.clone(), -c));
        } else {
            right.push((m.clone(), c.clone()));
        }
    }
    Formula::eq(side_term(left), side_term(right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse_equation;
    use proptest::prelude::*;

    fn rewrite(src: &str) -> String {
        let e = parse_equation(src).unwrap();
        print(&positive_rewrite(&e.lhs, &e.rhs))
    }

    #[test]
    fn constancy_formula_parses() {
        let f = parse("E s . t*t = s^5 + 1").unwrap();
        let s = Term::var("s");
        let want = Formula::exists(
            "s",
            Formula::eq(
                Term::mul(Term::var("t"), Term::var("t")),
                Term::add(Term::pow(&s, 5), Term::One),
            ),
        );
        assert_eq!(f, want);
        assert_eq!(print(&f), "E s . t*t = s^5 + 1");
    }

    #[test]
    fn trivial_atom() {
        let f = parse("0 = 0").unwrap();
        assert_eq!(f, Formula::truth());
        assert!(eval_ground(&f, &Assignment::new()).unwrap());
        assert!(!eval_ground(&parse("0 = 1").unwrap(), &Assignment::new()).unwrap());
    }

    #[test]
    fn numeral_expansion() {
        let f = parse("x = 3").unwrap();
        let three = Term::add(Term::mul(Term::two(), Term::One), Term::One);
        assert_eq!(f, Formula::eq(Term::var("x"), three));
        assert_eq!(print(&f), "x = 3");
        assert_eq!(Term::numeral_u64(2), Term::mul(Term::two(), Term::One));
        assert_eq!(Term::numeral_u64(6).numeral_value(), Some(BigUint::from(6u32)));
        // (1+1) alone is a sum, not the numeral 2.
        assert_eq!(print_term(&Term::two()), "1 + 1");
        assert_eq!(print_term(&parse_term("(1 + 1)*x").unwrap()), "(1 + 1)*x");
    }

    #[test]
    fn printer_shapes() {
        assert_eq!(print_term(&Term::Zero), "0");
        for src in [
            "x*(y + 1) = z^3*2",
            "E a . E b . a = b | (E c . c = 1) & 2 = 2",
            "(a = b | c = d) & (E e . e = 1)",
            "a*b*a = (a*b)^3",
            "x^2^3 = x*x*(x*x)*(x*x)",
            "(x = y)",
        ] {
            let f = parse(src).unwrap();
            let printed = print(&f);
            assert_eq!(parse(&printed).unwrap(), f, "{src} -> {printed}");
        }
        assert_eq!(print(&parse("(x = y)").unwrap()), "x = y");
        assert_eq!(print(&parse("x^2^3 = 1").unwrap()), "x*x*(x*x)*(x*x) = 1");
    }

    #[test]
    fn rejections() {
        for (src, tok) in [("x - 1 = 0", "-"), ("!(x = 1)", "!"), ("forall x . x = x", "forall")] {
            match parse(src) {
                Err(FormulaError::NotPositive { token, .. }) => assert_eq!(token, tok),
                other => panic!("{src}: {other:?}"),
            }
        }
        let msg = parse("x = 1 -").unwrap_err().to_string();
        assert!(msg.contains(NOT_POSITIVE), "{msg}");
        match parse("x = \n  (1 + ") {
            Err(FormulaError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("E z . z = z").is_err());
        assert!(parse("x = y y").is_err());
        assert!(parse("x = y^999999").is_err());
        assert!(parse("x % y").is_err());
    }

    #[test]
    fn pell_identity_evaluates() {
        let f = parse("x*x + y*y = 1 + z*z*y*y").unwrap();
        let mut a = Assignment::new();
        a.insert("x".into(), Element::Poly(RatPoly::from_i64s(&[-1, 0, 2])));
        a.insert("y".into(), Element::Poly(RatPoly::from_i64s(&[0, 2])));
        assert!(eval_ground(&f, &a).unwrap());
        a.insert("y".into(), Element::Poly(RatPoly::from_i64s(&[1, 2])));
        assert!(!eval_ground(&f, &a).unwrap());
    }

    #[test]
    fn constancy_with_quint_witness() {
        let f = parse("E s . t*t = s^5 + 1").unwrap();
        let three = BigRational::from_integer(3.into());
        let mut a = Assignment::new();
        a.insert("t".into(), Element::constant(three.clone()));
        a.insert("s".into(), Element::Quint(QuintAlgebraElem::generator(three)));
        assert!(eval_ground(&f, &a).unwrap());
    }

    #[test]
    fn evaluation_errors() {
        let f = parse("E s . t*t = s^5 + 1").unwrap();
        assert_eq!(eval_ground(&f, &Assignment::new()), Err(FormulaError::Unbound("s".into())));
        let mut a = Assignment::new();
        a.insert("s".into(), Element::Poly(RatPoly::one()));
        assert_eq!(eval_ground(&f, &a), Err(FormulaError::Unbound("t".into())));

        let g = parse("a = b").unwrap();
        let mut a = Assignment::new();
        a.insert("a".into(), Element::Quint(QuintAlgebraElem::generator(BigRational::from_integer(2.into()))));
        a.insert("b".into(), Element::Quint(QuintAlgebraElem::generator(BigRational::from_integer(3.into()))));
        assert!(matches!(eval_ground(&g, &a), Err(FormulaError::IncomparableAlgebras(..))));
    }

    #[test]
    fn sign_splitting() {
        assert_eq!(rewrite("(z - 1)*f = y - t"), "z*f + t = f + y");
        assert_eq!(rewrite("x^2 - (z^2 - 1)*y^2 = 1"), "x*x + y*y = 1 + z*z*y*y");
        assert_eq!(rewrite("a = a"), "a = a");
        assert_eq!(rewrite("n - 3"), "n = 3");
        assert_eq!(rewrite("-2*x = 0"), "0 = 2*x");
    }

    #[test]
    fn witness_files() {
        let text = "# comment\nx = [1, 0, -1/2]\ns = quint(3, [0, 1])\n\n";
        let a = parse_assignment(text).unwrap();
        assert_eq!(a["x"], Element::Poly("[1, 0, -1/2]".parse().unwrap()));
        let s = QuintAlgebraElem::generator(BigRational::from_integer(3.into()));
        assert_eq!(a["s"], Element::Quint(s));
        assert_eq!(parse_assignment(&format_assignment(&a)).unwrap(), a);
        assert!(parse_assignment("x [1]").is_err());
        assert!(parse_assignment("z = [1]").is_err());
        assert!(parse_assignment("x = [1]\nx = [2]").is_err());
        assert!(parse_assignment("s = quint(1, [1,2,3,4,5,6])").is_err());
    }

    #[test]
    fn audit_flags_free_variables() {
        assert!(audit_sentence(&parse("E x . x = 1").unwrap()).is_empty());
        assert!(!audit_sentence(&parse("x = 1").unwrap()).is_empty());
    }

    pub(crate) fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Zero),
            Just(Term::One),
            Just(Term::Z),
            prop::sample::select(vec!["a", "b", "x_1", "s"]).prop_map(Term::var),
            (0u64..100_000).prop_map(Term::numeral_u64),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
                (inner, 2u32..5).prop_map(|(a, e)| Term::pow(&a, e)),
            ]
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let atom = (arb_term(), arb_term()).prop_map(|(a, b)| Formula::eq(a, b));
        atom.prop_recursive(6, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (prop::sample::select(vec!["a", "s", "w"]), inner).prop_map(|(v, f)| Formula::exists(v, f)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = print(&f);
            prop_assert_eq!(parse(&text).unwrap(), f);
        }

        #[test]
        fn numerals_evaluate_to_constants(n in 0u64..=1_000_000) {
            let v = eval_term(&Term::numeral_u64(n), &Assignment::new()).unwrap();
            prop_assert_eq!(v, Element::Poly(RatPoly::from_int(n)));
            let parsed = parse_term(&n.to_string()).unwrap();
            prop_assert_eq!(parsed, Term::numeral_u64(n));
        }

        #[test]
        fn rewrite_is_sound(lhs in arb_term(), rhs in arb_term(), neg in arb_term()) {
            // lhs + neg·(-1) = rhs, as a signed identity
            let l = lhs.to_mpoly().sub(&neg.to_mpoly());
            let r = rhs.to_mpoly();
            let atom = positive_rewrite(&l, &r);
            let Formula::Eq(a, b) = &atom else { unreachable!() };
            prop_assert_eq!(a.to_mpoly().sub(&b.to_mpoly()), l.sub(&r));
        }
    }
}
