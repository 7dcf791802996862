//! Sparse multivariate polynomials with integer coefficients in named
//! variables, and the signed equation mini-language.
//!
//! The variable `z` is an ordinary name here; callers decide whether it is
//! the distinguished ring element or forbidden.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyring::RatPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct EquationError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// Exponents keyed by variable name; zero exponents are never stored.
pub type Monomial = BTreeMap<String, u32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        MPoly { terms }
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(BigInt::one(), [(name.to_string(), 1)].into())
    }

    pub fn monomial(c: BigInt, m: Monomial) -> Self {
        let mut p = MPoly::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let m: Monomial = m.into_iter().filter(|(_, e)| *e > 0).collect();
        let slot = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> Vec<String> {
        let mut v: Vec<String> = self.terms.keys().flat_map(|m| m.keys().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Total degree, `-1` for zero.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.values().map(|&e| e as i64).sum())
            .max()
            .unwrap_or(-1)
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    *m.entry(v.clone()).or_insert(0) += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        (0..e).fold(MPoly::constant(1), |acc, _| acc.mul(self))
    }

    /// Integer evaluation; missing variables are an error.
    pub fn eval_int(&self, at: &HashMap<String, BigInt>) -> Result<BigInt, String> {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = at.get(v).ok_or_else(|| format!("unbound variable `{v}`"))?;
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluation at polynomial values; `z` maps to the indeterminate unless
    /// it is bound explicitly.
    pub fn eval_poly(&self, at: &HashMap<String, RatPoly>) -> Result<RatPoly, String> {
        let z = RatPoly::z();
        let mut acc = RatPoly::zero();
        for (m, c) in &self.terms {
            let mut t = RatPoly::from_int(c.clone());
            for (v, e) in m {
                let x = match at.get(v) {
                    Some(x) => x,
                    None if v == "z" => &z,
                    None => return Err(format!("unbound variable `{v}`")),
                };
                t = &t * &x.pow(*e as u64);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_empty() {
                parts.push(a.to_string());
            }
            for (v, e) in m {
                parts.push(if *e == 1 { v.clone() } else { format!("{v}^{e}") });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Equation mini-language: `expr ('=' expr)?` with + - * ^ and parentheses.
// ---------------------------------------------------------------------------

/// A parsed signed equation `lhs = rhs` (rhs is zero when omitted) together
/// with the identifiers in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: MPoly,
    pub rhs: MPoly,
    pub identifiers: Vec<String>,
}

impl Equation {
    /// `lhs − rhs`.
    pub fn difference(&self) -> MPoly {
        self.lhs.sub(&self.rhs)
    }
}

struct EqParser {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    idents: Vec<String>,
}

pub fn parse_equation(src: &str) -> Result<Equation, EquationError> {
    let mut chars = Vec::new();
    let (mut line, mut col) = (1, 1);
    for ch in src.chars() {
        chars.push((line, col, ch));
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    let mut p = EqParser {
        chars,
        pos: 0,
        idents: Vec::new(),
    };
    let lhs = p.expr()?;
    let rhs = if p.eat('=') { p.expr()? } else { MPoly::zero() };
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(Equation {
        lhs,
        rhs,
        identifiers: p.idents,
    })
}

impl EqParser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.2.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.2)
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> EquationError {
        let (line, col) = self
            .chars
            .get(self.pos)
            .map(|c| (c.0, c.1))
            .or_else(|| self.chars.last().map(|c| (c.0, c.1 + 1)))
            .unwrap_or((1, 1));
        EquationError {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<MPoly, EquationError> {
        let mut acc = if self.eat('-') {
            self.product()?.neg()
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<MPoly, EquationError> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MPoly, EquationError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            self.skip_ws();
            let e = self.number()?;
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|&e| e <= 1000)
                .ok_or_else(|| self.err("exponent too large"))?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<BigInt, EquationError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.2.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|c| c.2).collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<MPoly, EquationError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some(c) if c.is_ascii_digit() => Ok(MPoly::constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.2.is_ascii_alphanumeric() || c.2 == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().map(|c| c.2).collect();
                if !self.idents.contains(&name) {
                    self.idents.push(name.clone());
                }
                Ok(MPoly::var(&name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
