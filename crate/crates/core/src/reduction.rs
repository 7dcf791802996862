//! Definability formulas and the compiler from integer Diophantine equations
//! to positive-existential `L_z` sentences.
//!
//! Fresh variables are named `_{owner}_{role}`. User unknowns may not start
//! with `_`, so fresh names never collide with them.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formula::{
    eval_ground, format_assignment, is_valid_var, parse_assignment, positive_rewrite, Assignment, Element,
    Formula, FormulaError, Term,
};
use crate::mpoly::{parse_equation, MPoly};
use crate::params::ParamSet;
use crate::pell::{gen_table, group_pow, recognize, PellPair};
use crate::polyring::{divides_exactly, format_rational, QuintAlgebraElem, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("equation: {0}")]
    Equation(String),
    #[error("invalid unknown `{0}`: unknowns are identifiers other than `z` not starting with `_`")]
    InvalidUnknown(String),
    #[error("the equation has no unknowns")]
    NoUnknowns,
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("not a solution: P({0}) = {1}")]
    NotASolution(String, BigInt),
    #[error("{0} is not in k·ℤ for k = {1}")]
    NotInKZ(String, u64),
    #[error("index {0} is too large")]
    TooLarge(BigInt),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("search needs a prenex sentence: {0}")]
    NotPrenex(String),
    #[error("node budget of {0} exceeded")]
    BudgetExceeded(u64),
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

/// An integer polynomial equation `P = 0` in named unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineInput {
    poly: MPoly,
    unknowns: Vec<String>,
}

impl DiophantineInput {
    /// `unknowns` fixes the order of solution vectors; it must cover every
    /// variable of `poly`.
    pub fn new(poly: MPoly, unknowns: Vec<String>) -> Result<Self, ReductionError> {
        if unknowns.is_empty() {
            return Err(ReductionError::NoUnknowns);
        }
        for u in &unknowns {
            if !is_valid_var(u) || u.starts_with('_') {
                return Err(ReductionError::InvalidUnknown(u.clone()));
            }
        }
        if let Some(v) = poly.variables().into_iter().find(|v| !unknowns.contains(v)) {
            return Err(ReductionError::InvalidUnknown(v));
        }
        Ok(DiophantineInput { poly, unknowns })
    }

    /// Parses `lhs = rhs` or a bare polynomial; unknowns are ordered by first
    /// appearance.
    pub fn parse(src: &str) -> Result<Self, ReductionError> {
        let eq = parse_equation(src).map_err(|e| ReductionError::Equation(e.to_string()))?;
        Self::new(eq.difference(), eq.identifiers)
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn eval(&self, solution: &[BigInt]) -> Result<BigInt, ReductionError> {
        if solution.len() != self.unknowns.len() {
            return Err(ReductionError::Arity {
                expected: self.unknowns.len(),
                got: solution.len(),
            });
        }
        let at: HashMap<String, BigInt> = self.unknowns.iter().cloned().zip(solution.iter().cloned()).collect();
        Ok(self.poly.eval_int(&at).expect("every variable is an unknown"))
    }
}

// ---------------------------------------------------------------------------
// Formula builders
// ---------------------------------------------------------------------------

fn var(v: &str) -> MPoly {
    MPoly::var(v)
}

fn z2_minus_1() -> MPoly {
    var("z").mul(&var("z")).sub(&MPoly::constant(1))
}

fn ratpoly_to_mpoly(p: &RatPoly) -> MPoly {
    let mut out = MPoly::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        assert!(c.is_integer(), "integer polynomial expected");
        out = out.add(&MPoly::constant(c.to_integer()).mul(&var("z").pow(i as u32)));
    }
    out
}

fn pell_atom(x: &str, y: &str) -> Formula {
    let lhs = var(x).mul(&var(x)).sub(&z2_minus_1().mul(&var(y)).mul(&var(y)));
    positive_rewrite(&lhs, &MPoly::constant(1))
}

fn eq_vars(a: &str, b: &str) -> Formula {
    Formula::eq(Term::var(a), Term::var(b))
}

/// `c(t) := ∃s. t·t = s⁵ + 1`.
pub fn formula_c(arg: &Term, s: &str) -> Formula {
    Formula::exists(s, c_atom(arg, s))
}

fn c_atom(arg: &Term, s: &str) -> Formula {
    Formula::eq(
        Term::mul(arg.clone(), arg.clone()),
        Term::add(Term::pow(&Term::var(s), 5), Term::One),
    )
}

/// A quantifier-free conjunction together with the variables to bind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vars: Vec<String>,
    pub atoms: Vec<Formula>,
}

impl Block {
    pub fn to_formula(&self) -> Formula {
        Formula::exists_all(&self.vars, Formula::and_all(self.atoms.clone()))
    }

    fn extend(&mut self, other: Block) {
        self.vars.extend(other.vars);
        self.atoms.extend(other.atoms);
    }
}

/// Membership of `(x, y)` in the `k`-th power subgroup, with `y_k | y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YkBlock {
    pub x: String,
    pub y: String,
    pub k: u64,
    pub block: Block,
    /// Pair-level constraints: Pell, seed, `k − 1` chain steps, terminal,
    /// divisibility.
    pub constraints: usize,
}

impl YkBlock {
    pub fn to_formula(&self) -> Formula {
        self.block.to_formula()
    }
}

struct Names<'a> {
    prefix: &'a str,
}

impl Names<'_> {
    fn n(&self, role: &str) -> String {
        format!("_{}_{}", self.prefix, role)
    }

    fn u(&self, j: u64) -> String {
        self.n(&format!("u{j}"))
    }

    fn v(&self, j: u64) -> String {
        self.n(&format!("v{j}"))
    }
}

fn yk_block(params: &ParamSet, x: &str, y: &str, names: &Names) -> YkBlock {
    let k = params.k;
    let (s, t, g) = (names.n("s"), names.n("t"), names.n("g"));
    let mut vars = vec![s.clone(), t.clone()];
    vars.extend((1..=k).map(|j| names.u(j)));
    vars.extend((1..=k).map(|j| names.v(j)));
    vars.push(g.clone());

    let mut atoms = vec![pell_atom(&s, &t), eq_vars(&names.u(1), &s), eq_vars(&names.v(1), &t)];
    let d = z2_minus_1();
    for j in 1..k {
        let (u, v) = (var(&names.u(j)), var(&names.v(j)));
        let f = u.mul(&var(&s)).add(&d.mul(&v).mul(&var(&t)));
        let gg = u.mul(&var(&t)).add(&v.mul(&var(&s)));
        atoms.push(positive_rewrite(&var(&names.u(j + 1)), &f));
        atoms.push(positive_rewrite(&var(&names.v(j + 1)), &gg));
    }
    atoms.push(eq_vars(&names.u(k), x));
    atoms.push(eq_vars(&names.v(k), y));
    let yk = gen_table(k as usize).pop().expect("nonempty").into_parts().1;
    atoms.push(positive_rewrite(&var(y), &ratpoly_to_mpoly(&yk).mul(&var(&g))));

    YkBlock {
        x: x.to_string(),
        y: y.to_string(),
        k,
        block: Block { vars, atoms },
        constraints: k as usize + 3,
    }
}

/// The `𝒴_k` membership block for `(x, y)`; fresh names are derived from `y`.
pub fn formula_yk(params: &ParamSet, x: &str, y: &str) -> YkBlock {
    yk_block(params, x, y, &Names { prefix: y })
}

fn phi_block(params: &ParamSet, arg: &Term, names: &Names) -> Block {
    let (x, y, f, c) = (names.n("x"), names.n("y"), names.n("f"), names.n("c"));
    let mut block = Block {
        vars: vec![x.clone(), y.clone(), f.clone()],
        atoms: Vec::new(),
    };
    block.extend(yk_block(params, &x, &y, names).block);
    // (z − 1)·f = y − arg
    block.atoms.push(Formula::eq(
        Term::add(Term::mul(Term::Z, Term::var(&f)), arg.clone()),
        Term::add(Term::var(&f), Term::var(&y)),
    ));
    block.vars.push(c.clone());
    block.atoms.push(c_atom(arg, &c));
    block
}

/// `Φ(t)`: `t` is a constant in `k·ℤ`.
pub fn formula_phi(params: &ParamSet, t: &str) -> Formula {
    phi_block(params, &Term::var(t), &Names { prefix: t }).to_formula()
}

fn k_times(params: &ParamSet, t: &str) -> Term {
    Term::mul(Term::numeral_u64(params.k), Term::var(t))
}

/// `Int(t) := Φ(k·t)`: `t` is a rational integer.
pub fn formula_int(params: &ParamSet, t: &str) -> Formula {
    phi_block(params, &k_times(params, t), &Names { prefix: t }).to_formula()
}

/// `∃t₁…t_r. ⋀ Int(tᵢ) ∧ P(t₁, …, t_r) = 0` in prenex form.
pub fn compile_htp(input: &DiophantineInput, params: &ParamSet) -> Formula {
    let mut all = Block {
        vars: input.unknowns.clone(),
        atoms: Vec::new(),
    };
    for u in &input.unknowns {
        all.extend(phi_block(params, &k_times(params, u), &Names { prefix: u }));
    }
    all.atoms.push(positive_rewrite(&input.poly, &MPoly::zero()));
    all.to_formula()
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

/// An assignment plus a short note on where each value came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WitnessBundle {
    pub assignment: Assignment,
    pub notes: BTreeMap<String, String>,
}

impl WitnessBundle {
    fn bind(&mut self, name: String, value: Element, note: impl Into<String>) {
        self.notes.insert(name.clone(), note.into());
        self.assignment.insert(name, value);
    }

    fn bind_poly(&mut self, name: String, value: RatPoly, note: impl Into<String>) {
        self.bind(name, Element::Poly(value), note)
    }

    /// Witness file text with each note as a trailing comment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.assignment {
            match self.notes.get(k) {
                Some(n) => out.push_str(&format!("{k} = {v}  # {n}\n")),
                None => out.push_str(&format!("{k} = {v}\n")),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ReductionError> {
        Ok(WitnessBundle {
            assignment: parse_assignment(text)?,
            notes: BTreeMap::new(),
        })
    }

    /// Plain witness file text without notes.
    pub fn to_plain_text(&self) -> String {
        format_assignment(&self.assignment)
    }
}

/// `gen(n)` for signed `n` from a table covering `|n|`.
fn pair_at(table: &[PellPair], n: i64) -> PellPair {
    let p = &table[n.unsigned_abs() as usize];
    if n < 0 {
        p.inverse()
    } else {
        p.clone()
    }
}

fn phi_witness_into(
    params: &ParamSet,
    value: &BigRational,
    names: &Names,
    out: &mut WitnessBundle,
) -> Result<(), ReductionError> {
    let k = params.k;
    let not_in = || ReductionError::NotInKZ(format_rational(value), k);
    if !value.is_integer() {
        return Err(not_in());
    }
    let (n, r) = value.to_integer().div_rem(&BigInt::from(k));
    if !r.is_zero() {
        return Err(not_in());
    }
    let n = n.to_i64().filter(|n| n.abs() <= 100_000).ok_or_else(|| ReductionError::TooLarge(n.clone()))?;
    let kn = n * k as i64;
    let table = gen_table(kn.unsigned_abs() as usize);
    let target = pair_at(&table, kn);
    let (x, y) = (target.x().clone(), target.y().clone());

    let z_minus_1 = RatPoly::from_i64s(&[-1, 1]);
    let f = (&y - &RatPoly::constant(value.clone()))
        .div_exact(&z_minus_1)
        .expect("z - 1 is nonzero")
        .expect("y_kn(1) = kn");
    let yk = table
        .get(k as usize)
        .cloned()
        .unwrap_or_else(|| gen_table(k as usize).pop().expect("nonempty"));
    let g = y.div_exact(yk.y()).expect("y_k is nonzero").expect("y_k | y_kn");

    out.bind_poly(names.n("x"), x, format!("x_{kn}"));
    out.bind_poly(names.n("y"), y, format!("y_{kn}"));
    out.bind_poly(names.n("f"), f, format!("(y_{kn} - {kn})/(z - 1)"));
    let s = pair_at(&table, n);
    out.bind_poly(names.n("s"), s.x().clone(), format!("x_{n}"));
    out.bind_poly(names.n("t"), s.y().clone(), format!("y_{n}"));
    for j in 1..=k {
        let p = pair_at(&table, j as i64 * n);
        out.bind_poly(names.u(j), p.x().clone(), format!("x_{}", j as i64 * n));
        out.bind_poly(names.v(j), p.y().clone(), format!("y_{}", j as i64 * n));
    }
    out.bind_poly(names.n("g"), g, format!("y_{kn}/y_{k}"));
    out.bind(
        names.n("c"),
        Element::Quint(QuintAlgebraElem::generator(value.clone())),
        format!("fifth root of {kn}^2 - 1"),
    );
    Ok(())
}

/// Witness for `Φ(t)` at the constant `t = value`, including `t` itself.
pub fn phi_witness(params: &ParamSet, t: &str, value: &BigRational) -> Result<WitnessBundle, ReductionError> {
    let mut w = WitnessBundle::default();
    w.bind(t.to_string(), Element::constant(value.clone()), "argument");
    phi_witness_into(params, value, &Names { prefix: t }, &mut w)?;
    Ok(w)
}

/// Witness for `Int(t)` at `t = value`.
pub fn int_witness(params: &ParamSet, t: &str, value: &BigRational) -> Result<WitnessBundle, ReductionError> {
    let mut w = WitnessBundle::default();
    w.bind(t.to_string(), Element::constant(value.clone()), "argument");
    let kv = value * BigRational::from_integer(params.k.into());
    phi_witness_into(params, &kv, &Names { prefix: t }, &mut w)?;
    Ok(w)
}

/// Witness for the `𝒴_k` block at `(x, y) = gen(k·n)`.
pub fn yk_witness(params: &ParamSet, x: &str, y: &str, n: i64) -> Result<WitnessBundle, ReductionError> {
    let names = Names { prefix: y };
    let mut w = WitnessBundle::default();
    phi_witness_into(params, &BigRational::from_integer((n * params.k as i64).into()), &names, &mut w)?;
    let x_val = w.assignment.remove(&names.n("x")).expect("bound");
    let y_val = w.assignment.remove(&names.n("y")).expect("bound");
    for role in ["f", "c"] {
        w.assignment.remove(&names.n(role));
        w.notes.remove(&names.n(role));
    }
    w.bind(x.to_string(), x_val, format!("x_{}", n * params.k as i64));
    w.bind(y.to_string(), y_val, format!("y_{}", n * params.k as i64));
    Ok(w)
}

/// The full witness for `compile_htp(input, params)` at an integer solution.
pub fn build_witness(
    input: &DiophantineInput,
    solution: &[BigInt],
    params: &ParamSet,
) -> Result<WitnessBundle, ReductionError> {
    let value = input.eval(solution)?;
    if !value.is_zero() {
        let shown: Vec<String> = solution.iter().map(|v| v.to_string()).collect();
        return Err(ReductionError::NotASolution(shown.join(","), value));
    }
    let mut w = WitnessBundle::default();
    for (u, n) in input.unknowns.iter().zip(solution) {
        let n = BigRational::from_integer(n.clone());
        w.bind(u.clone(), Element::constant(n.clone()), "solution value");
        let kn = &n * BigRational::from_integer(params.k.into());
        phi_witness_into(params, &kn, &Names { prefix: u }, &mut w)?;
    }
    Ok(w)
}

/// Strips the quantifier prefix and evaluates exactly under the bundle.
pub fn check_witness(f: &Formula, w: &Assignment) -> Result<bool, ReductionError> {
    Ok(eval_ground(f, w)?)
}

// ---------------------------------------------------------------------------
// Polynomial form of the 𝒴_k characterization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct YkFilterReport {
    pub k: u64,
    pub n_max: u64,
    pub candidates: usize,
    /// Accepted `(n, ε)`, meaning `(ε·x_n, y_n)` passed both conditions.
    pub accepted: Vec<(i64, i8)>,
    pub discrepancies: Vec<String>,
    pub pass: bool,
}

/// The `k`-th root of `(ε·x_n, y_n)` in the polynomial Pell family, if any.
fn kth_root(pair: &PellPair, k: u64, table: &[PellPair]) -> Option<PellPair> {
    let idx = recognize(pair)?;
    let n = idx.n.to_i64()?;
    if n % k as i64 != 0 {
        return None;
    }
    // (ε·x_m, y_m)^{⊕k} = (ε·x_{km}, y_{km}) because k is odd.
    let base = pair_at(table, n / k as i64);
    let root = if idx.epsilon == 1 {
        base
    } else {
        PellPair::new(-base.x().clone(), base.y().clone()).expect("sign of x keeps the norm")
    };
    (group_pow(&root, k) == *pair).then_some(root)
}

/// Decides both membership conditions over polynomial candidates
/// `(±x_n, y_n)`, `|n| ≤ n_max`, and compares with `k | n`.
pub fn yk_polynomial_filter(params: &ParamSet, n_max: u64) -> YkFilterReport {
    let k = params.k;
    let table = gen_table(n_max.max(k) as usize);
    let yk = table[k as usize].y().clone();
    let mut accepted = Vec::new();
    let mut discrepancies = Vec::new();
    let mut candidates = 0;
    for n in -(n_max as i64)..=n_max as i64 {
        let base = pair_at(&table, n);
        let divides = divides_exactly(&yk, base.y()).expect("y_k is nonzero");
        for eps in [1i8, -1] {
            candidates += 1;
            let x = if eps == 1 { base.x().clone() } else { -base.x().clone() };
            let pair = PellPair::new(x, base.y().clone()).expect("family member");
            let has_root = kth_root(&pair, k, &table).is_some();
            let expected = n % k as i64 == 0;
            if has_root && divides {
                accepted.push((n, eps));
            }
            if has_root != expected || divides != expected {
                discrepancies.push(format!(
                    "n = {n}, eps = {eps}: k-th root {has_root}, y_k | y_n {divides}, k | n {expected}"
                ));
            }
        }
    }
    let pass = discrepancies.is_empty();
    YkFilterReport {
        k,
        n_max,
        candidates,
        accepted,
        discrepancies,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Bounded witness search
// ---------------------------------------------------------------------------

/// Bounds and budget for [`bounded_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_degree: usize,
    pub max_height: u64,
    pub budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_degree: 3,
            max_height: 3,
            budget: 5_000_000,
        }
    }
}

fn eval_trunc(t: &Term, vals: &HashMap<&str, RatPoly>, n: usize) -> RatPoly {
    match t {
        Term::Zero => RatPoly::zero(),
        Term::One => RatPoly::one(),
        Term::Z => RatPoly::z().truncate(n),
        Term::Var(v) => vals[v.as_str()].truncate(n),
        Term::Add(a, b) => &eval_trunc(a, vals, n) + &eval_trunc(b, vals, n),
        Term::Mul(a, b) => (&eval_trunc(a, vals, n) * &eval_trunc(b, vals, n)).truncate(n),
    }
}

/// Whether the quantifier-free matrix can still hold modulo `z^n`.
fn holds_mod(f: &Formula, vals: &HashMap<&str, RatPoly>, n: usize) -> bool {
    match f {
        Formula::Eq(a, b) => eval_trunc(a, vals, n) == eval_trunc(b, vals, n),
        Formula::And(a, b) => holds_mod(a, vals, n) && holds_mod(b, vals, n),
        Formula::Or(a, b) => holds_mod(a, vals, n) || holds_mod(b, vals, n),
        Formula::Exists(..) => unreachable!("matrix is quantifier-free"),
    }
}

fn holds_exact(f: &Formula, vals: &HashMap<&str, RatPoly>) -> bool {
    let a: Assignment = vals.iter().map(|(k, v)| (k.to_string(), Element::Poly(v.clone()))).collect();
    eval_ground(f, &a).expect("all variables bound")
}

struct Search<'a> {
    vars: Vec<&'a str>,
    matrix: &'a Formula,
    coeffs: Vec<Vec<i64>>,
    limits: SearchLimits,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn values(&self) -> HashMap<&'a str, RatPoly> {
        self.vars
            .iter()
            .zip(&self.coeffs)
            .map(|(v, cs)| (*v, RatPoly::from_i64s(cs)))
            .collect()
    }

    /// Fills layer `j` (the coefficients of `z^j`) for variables `i..`.
    fn layer(&mut self, d: usize, j: usize, i: usize) -> Result<bool, ReductionError> {
        if i == self.vars.len() {
            self.nodes += 1;
            if self.nodes > self.limits.budget {
                return Err(ReductionError::BudgetExceeded(self.limits.budget));
            }
            if j == d && self.coeffs.iter().all(|c| c[d] == 0) && d > 0 {
                return Ok(false);
            }
            let vals = self.values();
            if !holds_mod(self.matrix, &vals, j + 1) {
                return Ok(false);
            }
            if j == d {
                return Ok(holds_exact(self.matrix, &vals));
            }
            return self.layer(d, j + 1, 0);
        }
        let h = self.limits.max_height as i64;
        for c in -h..=h {
            self.coeffs[i][j] = c;
            if self.layer(d, j, i + 1)? {
                return Ok(true);
            }
        }
        self.coeffs[i][j] = 0;
        Ok(false)
    }
}

/// Exhaustive search for integer-coefficient polynomial witnesses of a
/// prenex sentence, by degree shell, then coefficient layer from `z^0` up,
/// each layer in lexicographic order over `−H..H`.
///
/// A layer is abandoned as soon as the matrix fails modulo `z^{j+1}`, which
/// only depends on the coefficients fixed so far.
pub fn bounded_search(f: &Formula, limits: SearchLimits) -> Result<Option<Assignment>, ReductionError> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(ReductionError::NotPrenex(format!("free variables {free:?}")));
    }
    let (vars, matrix) = f.split_prefix();
    if !matrix.bound_vars().is_empty() {
        return Err(ReductionError::NotPrenex("quantifier inside the matrix".into()));
    }
    let mut vars_dedup: Vec<&str> = Vec::new();
    for v in vars {
        if !vars_dedup.contains(&v) {
            vars_dedup.push(v);
        }
    }
    let mut search = Search {
        vars: vars_dedup,
        matrix,
        coeffs: Vec::new(),
        limits,
        nodes: 0,
    };
    if search.vars.is_empty() {
        return Ok(holds_exact(matrix, &HashMap::new()).then(Assignment::new));
    }
    for d in 0..=limits.max_degree {
        search.coeffs = vec![vec![0; d + 1]; search.vars.len()];
        if search.layer(d, 0, 0)? {
            let vals = search.values();
            return Ok(Some(
                vals.into_iter()
                    .map(|(k, v)| (k.to_string(), Element::Poly(v)))
                    .collect(),
            ));
        }
    }
    Ok(None)
}
