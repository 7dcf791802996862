//! Self-check suites behind `htp-lz verify`.
//!
//! Each suite returns a one-line summary on success and the first
//! counterexample on failure. A suite can be run with an injected fault,
//! which perturbs one compared value so the harness itself is testable.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclotomic::{
    cos_elem, cos_elem_in, eval_poly_at, galois_kernel, rationality_nullspace, vandermonde_rank, CycloElem,
    CycloField,
};
use crate::formula::{self, eval_term, parse, parse_term, print, Assignment, Element, Formula, Term};
use crate::growth::{circle, estimate_order, eval_log_magnitude_branch, pell_residual, Branch, SolutionSpec};
use crate::params::ParamSet;
use crate::pell::{check_denef_with, gen, gen_table, group_add, recognize, PellPair};
use crate::polyring::RatPoly;
use crate::reduction::{
    build_witness, check_witness, compile_htp, formula_phi, phi_witness, yk_polynomial_filter, DiophantineInput,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level `{s}` (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Denef,
    Group,
    Chebyshev,
    Rationality,
    Vanishing,
    YkFilter,
    Reduction,
    Phi,
    Growth,
    Parser,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Denef,
        Suite::Group,
        Suite::Chebyshev,
        Suite::Rationality,
        Suite::Vanishing,
        Suite::YkFilter,
        Suite::Reduction,
        Suite::Phi,
        Suite::Growth,
        Suite::Parser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Denef => "denef",
            Suite::Group => "group",
            Suite::Chebyshev => "chebyshev",
            Suite::Rationality => "rationality",
            Suite::Vanishing => "vanishing",
            Suite::YkFilter => "yk-filter",
            Suite::Reduction => "reduction",
            Suite::Phi => "phi",
            Suite::Growth => "growth",
            Suite::Parser => "parser",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run_suite(suite: Suite, level: Level, fault: bool) -> SuiteResult {
    let full = level == Level::Full;
    let outcome = match suite {
        Suite::Denef => denef(full, fault),
        Suite::Group => group(full, fault),
        Suite::Chebyshev => chebyshev(full, fault),
        Suite::Rationality => rationality(full, fault),
        Suite::Vanishing => vanishing(fault),
        Suite::YkFilter => yk_filter(full, fault),
        Suite::Reduction => reduction(full, fault),
        Suite::Phi => phi(full, fault),
        Suite::Growth => growth(fault),
        Suite::Parser => parser(full, fault),
    };
    let (pass, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SuiteResult { suite, pass, detail }
}

/// Runs every suite, concurrently; results are reported in a fixed order.
pub fn verify_all(level: Level, inject: Option<Suite>) -> VerifyReport {
    let suites: Vec<SuiteResult> = std::thread::scope(|s| {
        let handles: Vec<_> = Suite::ALL
            .into_iter()
            .map(|suite| s.spawn(move || run_suite(suite, level, inject == Some(suite))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite panicked"))
            .collect()
    });
    let pass = suites.iter().all(|r| r.pass);
    VerifyReport { level, suites, pass }
}

fn signed_pair(table: &[PellPair], n: i64) -> PellPair {
    let p = &table[n.unsigned_abs() as usize];
    if n < 0 {
        p.inverse()
    } else {
        p.clone()
    }
}

fn denef(full: bool, fault: bool) -> Outcome {
    let (max, div) = if full { (200, 60) } else { (40, 40) };
    let r = check_denef_with(max, div);
    if let Some(c) = r.counterexample {
        return Err(c);
    }
    let table = gen_table(max as usize + 1);
    for n in -(max as i64)..=max as i64 {
        let mut p = signed_pair(&table, n);
        if fault && n == 5 {
            p = group_add(&p, &table[1]);
        }
        let idx = recognize(&p).ok_or_else(|| format!("gen({n}) not recognized"))?;
        ensure(idx.n == BigInt::from(n) && idx.epsilon == 1, || {
            format!("gen({n}) recognized as index {}", idx.n)
        })?;
    }
    Ok(format!("|n| <= {max}, divisibility for 1 <= k, n <= {div}"))
}

fn group(full: bool, fault: bool) -> Outcome {
    let pairs = if full { 500 } else { 100 };
    let table = gen_table(101);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..pairs {
        let (m, n) = (rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50));
        let want = signed_pair(&table, m + n + i64::from(fault && i == 0));
        ensure(group_add(&signed_pair(&table, m), &signed_pair(&table, n)) == want, || {
            format!("gen({m}) + gen({n}) != gen({})", m + n)
        })?;
    }
    let id = PellPair::identity();
    for _ in 0..50 {
        let mut pick = || {
            let p = signed_pair(&table, rng.gen_range(-30i64..=30));
            if rng.gen_bool(0.5) {
                p.negate()
            } else {
                p
            }
        };
        let (a, b, c) = (pick(), pick(), pick());
        ensure(
            group_add(&group_add(&a, &b), &c) == group_add(&a, &group_add(&b, &c)),
            || "associativity fails".into(),
        )?;
        ensure(group_add(&a, &b) == group_add(&b, &a), || "commutativity fails".into())?;
        ensure(group_add(&a, &id) == a, || "identity fails".into())?;
        ensure(group_add(&a, &a.inverse()) == id, || "inverse fails".into())?;
    }
    Ok(format!("{pairs} random pairs, 50 sampled triples"))
}

fn chebyshev(full: bool, fault: bool) -> Outcome {
    let (kmax, nmax) = if full { (30, 20) } else { (12, 10) };
    let table = gen_table(nmax as usize);
    for k in 3..=kmax {
        let field = CycloField::new(k);
        let c = cos_elem_in(&field, 1);
        let zinv = CycloElem::zeta_pow(&field, -1);
        let diff = CycloElem::zeta_pow(&field, 1).sub(&zinv).expect("same field");
        let half = BigRational::new(1.into(), 2.into());
        for n in 1..=nmax {
            let m = n + i64::from(fault && k == 5 && n == 3);
            let (zn, zmn) = (CycloElem::zeta_pow(&field, m), CycloElem::zeta_pow(&field, -m));
            let cos_n = zn.add(&zmn).expect("same field").scale(&half);
            let sin_n = zn.sub(&zmn).expect("same field");
            let p = &table[n as usize];
            ensure(eval_poly_at(p.x(), &c) == cos_n, || format!("x_{n} identity fails at k = {k}"))?;
            let lhs = diff.mul(&eval_poly_at(p.y(), &c)).expect("same field");
            ensure(lhs == sin_n, || format!("y_{n} identity fails at k = {k}"))?;
        }
    }
    Ok(format!("3 <= k <= {kmax}, 1 <= n <= {nmax}"))
}

fn rationality(full: bool, fault: bool) -> Outcome {
    let mut cases = vec![(5u64, 7u64, 2u64)];
    if full {
        cases.push((7, 11, 4));
    }
    for &(p, q, m) in &cases {
        let r = rationality_nullspace(p * q, m).map_err(|e| e.to_string())?;
        let want_dim = 1 + usize::from(fault);
        ensure(r.dimension == want_dim && r.basis == vec![RatPoly::one()], || {
            format!("k = {}, m = {m}: dimension {} basis {:?}", p * q, r.dimension, r.basis)
        })?;
        let rank = vandermonde_rank(q, m).map_err(|e| e.to_string())?;
        ensure(rank as u64 == m + 1, || format!("rank at q = {q}, m = {m} is {rank}"))?;
        let kernel = galois_kernel(p, q).map_err(|e| e.to_string())?;
        ensure(kernel.len() as u64 == p - 1, || format!("kernel for ({p}, {q}) has {} elements", kernel.len()))?;
    }
    let shown: Vec<String> = cases.iter().map(|(p, q, m)| format!("(k={}, m={m})", p * q)).collect();
    Ok(format!("constants only at {}", shown.join(", ")))
}

fn vanishing(fault: bool) -> Outcome {
    let y = gen(if fault { 34 } else { 35 }).into_parts().1;
    for a in 1..35 {
        let v = eval_poly_at(&y, &cos_elem(35, a).map_err(|e| e.to_string())?);
        ensure(v.is_zero(), || format!("y_35 does not vanish at cos(2*pi*{a}/35)"))?;
    }
    Ok("y_35(cos(2*pi*a/35)) = 0 for a = 1..34".into())
}

fn yk_filter(full: bool, fault: bool) -> Outcome {
    let params = ParamSet::rho_zero();
    let n_max = if full { 200 } else { 40 };
    let r = yk_polynomial_filter(&params, n_max);
    if let Some(d) = r.discrepancies.first() {
        return Err(d.clone());
    }
    let k = params.k as i64 + 2 * i64::from(fault);
    let expected: Vec<(i64, i8)> = (-(n_max as i64)..=n_max as i64)
        .filter(|n| n % k == 0)
        .flat_map(|n| [(n, 1), (n, -1)])
        .collect();
    ensure(r.accepted == expected, || format!("accepted {:?}", r.accepted))?;
    Ok(format!("k = 35, |n| <= {n_max}: {} accepted of {}", r.accepted.len(), r.candidates))
}

fn reduction(full: bool, fault: bool) -> Outcome {
    let params = ParamSet::rho_zero();
    let mut cases = vec![("n - 3", vec![3i64])];
    if full {
        cases.push(("n1^2 + n2^2 - n3^2", vec![3, 4, 5]));
    }
    for (src, sol) in &cases {
        let input = DiophantineInput::parse(src).map_err(|e| e.to_string())?;
        let sol: Vec<BigInt> = sol.iter().map(|&v| v.into()).collect();
        let f = compile_htp(&input, &params);
        let audit = formula::audit_sentence(&f);
        ensure(audit.is_empty(), || format!("{src}: {}", audit.join("; ")))?;
        let w = build_witness(&input, &sol, &params).map_err(|e| e.to_string())?;
        ensure(check_witness(&f, &w.assignment) == Ok(true), || format!("{src}: witness rejected"))?;
        for u in input.unknowns() {
            for name in [format!("_{u}_y"), format!("_{u}_g"), u.clone()] {
                let mut bad = w.assignment.clone();
                let v = bad[&name].plus_one();
                bad.insert(name.clone(), v);
                let accepted = check_witness(&f, &bad) == Ok(true);
                ensure(accepted == fault, || format!("{src}: corrupting {name} gives acceptance {accepted}"))?;
            }
        }
    }
    Ok(format!("compiled, witnessed and corrupted: {}", cases.iter().map(|c| c.0).collect::<Vec<_>>().join("; ")))
}

fn phi(full: bool, fault: bool) -> Outcome {
    let params = ParamSet::rho_zero();
    let k = params.k as i64;
    let bound = if full { 3 * k } else { k };
    let f = formula_phi(&params, "t");
    let divisor = k - i64::from(fault);
    for c in -bound..=bound {
        let w = phi_witness(&params, "t", &BigRational::from_integer(c.into()));
        ensure(w.is_ok() == (c % divisor == 0), || format!("c = {c}: witness {}", w.is_ok()))?;
        if let Ok(w) = w {
            ensure(check_witness(&f, &w.assignment) == Ok(true), || format!("c = {c}: witness rejected"))?;
        }
    }
    Ok(format!("c in [-{bound}, {bound}]: witness iff 35 | c"))
}

fn growth(fault: bool) -> Outcome {
    let mut details = Vec::new();
    for (n, h, order) in [(1i64, vec![1i64], 1.0), (0, vec![0, 1], 2.0), (2, vec![0, 0, 1], 3.0)] {
        let h = if fault && n == 1 { vec![0, 1] } else { h };
        let spec = SolutionSpec::new(n, RatPoly::from_i64s(&h));
        let est = estimate_order(&spec, 10.0, 1e4, 12).map_err(|e| e.to_string())?;
        ensure((est.rho_hat - order).abs() <= 0.25, || format!("{spec}: rho_hat = {}", est.rho_hat))?;
        details.push(format!("{:.3}", est.rho_hat));
    }
    for n in 0..4 {
        for h in [vec![], vec![1], vec![0, 1], vec![1, 0, 1]] {
            let spec = SolutionSpec::new(n, RatPoly::from_i64s(&h));
            let r = pell_residual(&spec, &circle(3.0, 64)).map_err(|e| e.to_string())?;
            ensure(r < 1e-6, || format!("{spec}: residual {r:e}"))?;
            for z in circle(40.0, 16).into_iter().chain([Complex64::new(2.0, 0.0)]) {
                let a = eval_log_magnitude_branch(&spec, z, Branch::Principal).map_err(|e| e.to_string())?;
                let b = eval_log_magnitude_branch(&spec, z, Branch::Negated).map_err(|e| e.to_string())?;
                let close = |u: f64, v: f64| u == v || (u - v).abs() <= 1e-10 * u.abs().max(1.0);
                ensure(close(a.0, b.0) && close(a.1, b.1), || format!("{spec}: branch dependence at {z}"))?;
            }
        }
    }
    Ok(format!("rho_hat = {}", details.join(", ")))
}

/// A random formula over a small variable pool.
pub fn random_formula<R: Rng>(rng: &mut R, depth: u32) -> Formula {
    const POOL: [&str; 6] = ["a", "b", "s", "t", "x1", "_u"];
    if depth == 0 || rng.gen_bool(0.35) {
        return Formula::eq(random_term(rng, 3), random_term(rng, 3));
    }
    match rng.gen_range(0..3) {
        0 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        1 => Formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        _ => Formula::exists(POOL[rng.gen_range(0..POOL.len())], random_formula(rng, depth - 1)),
    }
}

/// A random term, including numerals and repeated products.
pub fn random_term<R: Rng>(rng: &mut R, depth: u32) -> Term {
    const POOL: [&str; 6] = ["a", "b", "s", "t", "x1", "_u"];
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 => Term::Zero,
            1 => Term::One,
            2 => Term::Z,
            3 => Term::var(POOL[rng.gen_range(0..POOL.len())]),
            _ => Term::numeral_u64(rng.gen_range(0..=1_000_000)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::add(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        1 => Term::mul(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        _ => Term::pow(&random_term(rng, depth - 1), rng.gen_range(2..6)),
    }
}

fn parser(full: bool, fault: bool) -> Outcome {
    let count = if full { 10_000 } else { 1_000 };
    let mut rng = ChaCha8Rng::seed_from_u64(0xa57);
    for i in 0..count {
        let f = random_formula(&mut rng, 4);
        let text = print(&f);
        let back = parse(&text).map_err(|e| format!("`{text}`: {e}"))?;
        let want = match (&f, fault && i == 0) {
            (Formula::Eq(a, b), true) if a != b => Formula::eq(b.clone(), a.clone()),
            (_, true) => Formula::and(f.clone(), f.clone()),
            _ => f,
        };
        ensure(back == want, || format!("round trip changed `{text}`"))?;
    }
    for bad in ["x - 1 = 0", "!(x = 1)", "~(x = 1)", "forall x . x = x", "E x . -x = 1"] {
        match parse(bad) {
            Err(e) if e.to_string().contains("not in the positive existential language") => {}
            other => return Err(format!("`{bad}` gave {other:?}")),
        }
    }
    for _ in 0..100 {
        let n: u64 = rng.gen_range(0..=1_000_000);
        let t = Term::numeral(&BigUint::from(n));
        let v = eval_term(&t, &Assignment::new()).map_err(|e| e.to_string())?;
        ensure(v == Element::Poly(RatPoly::from_int(n)), || format!("numeral {n} evaluates to {v}"))?;
        ensure(parse_term(&n.to_string()).ok() == Some(t.clone()), || format!("numeral {n} parses differently"))?;
        ensure(formula::print_term(&t) == n.to_string(), || format!("numeral {n} prints differently"))?;
    }
    Ok(format!("{count} round trips, 5 rejections, 100 numerals"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass_and_faults_are_caught() {
        for suite in [Suite::Group, Suite::Vanishing, Suite::Parser, Suite::Growth, Suite::Phi] {
            assert!(run_suite(suite, Level::Quick, false).pass, "{suite}");
            assert!(!run_suite(suite, Level::Quick, true).pass, "{suite} with fault");
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
    }
}
