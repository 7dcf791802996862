//! Polynomial solutions of `X² − (z² − 1)·Y² = 1`.
//!
//! A [`PellPair`] `(x, y)` stands for the formal expression `x + y·w` with
//! `w² = z² − 1`. The family `x_n + y_n·w = (z + w)^n` consists of the
//! Chebyshev polynomials `x_n = T_n`, `y_n = U_{n−1}`; together with the
//! sign flips `(−x_n, y_n)` these are all polynomial solutions.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::polyring::{divides_exactly, IntPoly, PolyError, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("pair does not satisfy x^2 - (z^2-1)y^2 = 1")]
    NotASolution,
    #[error("pair file must hold exactly two polynomial lines, found {0}")]
    PairFormat(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `z² − 1`.
pub fn pell_discriminant() -> RatPoly {
    RatPoly::from_i64s(&[-1, 0, 1])
}

fn pell_norm(x: &RatPoly, y: &RatPoly) -> RatPoly {
    &(x * x) - &(&pell_discriminant() * &(y * y))
}

/// A solution `(x, y)` of the Pell equation over ℚ[z].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PellPair {
    x: RatPoly,
    y: RatPoly,
}

impl PellPair {
    /// Checked constructor.
    pub fn new(x: RatPoly, y: RatPoly) -> Result<Self, PellError> {
        if pell_norm(&x, &y).is_one() {
            Ok(PellPair { x, y })
        } else {
            Err(PellError::NotASolution)
        }
    }

    // Callers guarantee the invariant.
    fn trusted(x: RatPoly, y: RatPoly) -> Self {
        PellPair { x, y }
    }

    pub fn identity() -> Self {
        Self::trusted(RatPoly::one(), RatPoly::zero())
    }

    pub fn x(&self) -> &RatPoly {
        &self.x
    }

    pub fn y(&self) -> &RatPoly {
        &self.y
    }

    pub fn into_parts(self) -> (RatPoly, RatPoly) {
        (self.x, self.y)
    }

    /// The group inverse `(x, −y)`, i.e. the conjugate `x − y·w`.
    pub fn inverse(&self) -> Self {
        Self::trusted(self.x.clone(), -&self.y)
    }

    /// `(−x, −y)`, the product with `−1`.
    pub fn negate(&self) -> Self {
        Self::trusted(-&self.x, -&self.y)
    }

    /// Parses the two-line pair-file format.
    pub fn parse_pair(text: &str) -> Result<Self, PellError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 2 {
            return Err(PellError::PairFormat(lines.len()));
        }
        Self::new(lines[0].parse()?, lines[1].parse()?)
    }
}

impl fmt::Display for PellPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.x)?;
        write!(f, "{}", self.y)
    }
}

/// Identifies `(ε·x_n, y_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellIndex {
    #[serde(serialize_with = "crate::ser_display")]
    pub n: BigInt,
    pub epsilon: i8,
}

/// One step `(x, y) ↦ (z·x + (z² − 1)·y, x + z·y)` on integer coefficients.
fn step(x: &[BigInt], y: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let at = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
    let nx = (0..=x.len().max(y.len() + 1))
        .map(|i| {
            let mut c = -at(y, i);
            if i >= 1 {
                c += at(x, i - 1);
            }
            if i >= 2 {
                c += at(y, i - 2);
            }
            c
        })
        .collect();
    let ny = (0..=x.len().max(y.len()))
        .map(|i| if i >= 1 { at(x, i) + at(y, i - 1) } else { at(x, i) })
        .collect();
    (nx, ny)
}

fn to_pair(x: &[BigInt], y: &[BigInt]) -> PellPair {
    PellPair::trusted(IntPoly::new(x.to_vec()).to_rat(), IntPoly::new(y.to_vec()).to_rat())
}

/// `(x_n, y_n)` with `x_n + y_n·w = (z + w)^n`.
pub fn gen(n: i64) -> PellPair {
    let (mut x, mut y) = (vec![BigInt::one()], Vec::new());
    for _ in 0..n.unsigned_abs() {
        (x, y) = step(&x, &y);
    }
    let p = to_pair(&x, &y);
    if n < 0 {
        p.inverse()
    } else {
        p
    }
}

/// All pairs `gen(0..=n)` from a single pass of the recurrence.
pub fn gen_table(n: usize) -> Vec<PellPair> {
    let (mut x, mut y) = (vec![BigInt::one()], Vec::new());
    let mut out = Vec::with_capacity(n + 1);
    out.push(PellPair::identity());
    for _ in 0..n {
        (x, y) = step(&x, &y);
        out.push(to_pair(&x, &y));
    }
    out
}

/// The group law: `f + g·w = (u + v·w)(x + y·w)`.
pub fn group_add(a: &PellPair, b: &PellPair) -> PellPair {
    let f = &(&a.x * &b.x) + &(&pell_discriminant() * &(&a.y * &b.y));
    let g = &(&a.x * &b.y) + &(&a.y * &b.x);
    PellPair::trusted(f, g)
}

/// `a^{⊕k}` by binary powering.
pub fn group_pow(a: &PellPair, k: u64) -> PellPair {
    let mut acc = PellPair::identity();
    let mut base = a.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = group_add(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = group_add(&base, &base);
        }
    }
    acc
}

/// `a^{⊕k}` for any integer `k`.
pub fn group_pow_signed(a: &PellPair, k: i64) -> PellPair {
    let p = group_pow(a, k.unsigned_abs());
    if k < 0 {
        p.inverse()
    } else {
        p
    }
}

/// Finds `(n, ε)` with `a = (ε·x_n, y_n)`, or `None` if `a` is not in the family.
///
/// The candidate index is `y(1)`; it is confirmed against `deg x = |n|` and
/// then by structural comparison with `gen(n)`.
pub fn recognize(a: &PellPair) -> Option<PellIndex> {
    let at_one = a.y.eval(&BigRational::one());
    if !at_one.is_integer() {
        return None;
    }
    let n = at_one.to_integer();
    if BigInt::from(a.x.degree()) != n.abs() {
        return None;
    }
    let g = gen(n.to_i64()?);
    let epsilon = if g.x == a.x {
        1
    } else if -&g.x == a.x {
        -1
    } else {
        return None;
    };
    (g.y == a.y).then_some(PellIndex { n, epsilon })
}

/// Outcome of [`check_denef_properties`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenefReport {
    pub max: u32,
    pub pass: bool,
    pub counterexample: Option<String>,
}

/// Checks, for `|n| ≤ max`: the Pell identity, integer coefficients,
/// `deg x_n = |n|`, `y_n(1) = n`, and for `1 ≤ k, n ≤ max` that
/// `y_k | y_n` exactly when `k | n`.
pub fn check_denef_properties(max: u32) -> DenefReport {
    check_denef_with(max, max)
}

/// As [`check_denef_properties`] with a separate bound for the divisibility
/// sweep.
pub fn check_denef_with(max: u32, div_max: u32) -> DenefReport {
    let fail = |msg: String| DenefReport {
        max,
        pass: false,
        counterexample: Some(msg),
    };
    let table = gen_table(max.max(div_max) as usize);
    for n in -(max as i64)..=max as i64 {
        let p = if n >= 0 {
            table[n as usize].clone()
        } else {
            table[n.unsigned_abs() as usize].inverse()
        };
        if !pell_norm(&p.x, &p.y).is_one() {
            return fail(format!("Pell identity fails at n = {n}"));
        }
        if !p.x.is_integral() || !p.y.is_integral() {
            return fail(format!("non-integer coefficient at n = {n}"));
        }
        if p.x.degree() != n.abs() {
            return fail(format!("deg x_{n} = {} != {}", p.x.degree(), n.abs()));
        }
        if p.y.eval(&BigRational::one()) != BigRational::from_integer(n.into()) {
            return fail(format!("y_{n}(1) != {n}"));
        }
    }
    for k in 1..=div_max as usize {
        for n in 1..=div_max as usize {
            let divides = divides_exactly(&table[k].y, &table[n].y).expect("y_k is nonzero for k >= 1");
            if divides != (n % k == 0) {
                return fail(format!("y_{k} | y_{n} is {divides}, but {k} | {n} is {}", n % k == 0));
            }
        }
    }
    DenefReport {
        max,
        pass: true,
        counterexample: None,
    }
}

/// Leading coefficient of `y_n`, which is `2^{n−1}` for `n ≥ 1`.
pub fn y_leading(n: u32) -> BigInt {
    gen(n as i64)
        .y
        .leading()
        .map(|c| c.to_integer())
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(cs: &[i64]) -> RatPoly {
        RatPoly::from_i64s(cs)
    }

    /// Independent oracle: expand (z + w)^n as a + b·w, reducing w² → z² − 1,
    /// with i128 coefficient vectors.
    fn binomial_oracle(n: usize) -> (Vec<i128>, Vec<i128>) {
        let mut a = vec![1i128];
        let mut b = vec![0i128];
        for _ in 0..n {
            // (a + b w)(z + w) = (a z + b (z^2 - 1)) + (a + b z) w
            let mut na = vec![0i128; a.len().max(b.len() + 2) + 1];
            let mut nb = vec![0i128; a.len().max(b.len() + 1) + 1];
            for (i, c) in a.iter().enumerate() {
                na[i + 1] += c;
                nb[i] += c;
            }
            for (i, c) in b.iter().enumerate() {
                na[i + 2] += c;
                na[i] -= c;
                nb[i + 1] += c;
            }
            a = na;
            b = nb;
        }
        (a, b)
    }

    fn from_i128(v: &[i128]) -> RatPoly {
        RatPoly::new(
            v.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    #[test]
    fn small_members() {
        assert_eq!(gen(0), PellPair::identity());
        assert_eq!(gen(1).into_parts(), (p(&[0, 1]), p(&[1])));
        assert_eq!(gen(2).into_parts(), (p(&[-1, 0, 2]), p(&[0, 2])));
        assert_eq!(gen(-1).into_parts(), (p(&[0, 1]), p(&[-1])));
    }

    #[test]
    fn recurrence_matches_binomial_expansion() {
        for n in 0..40 {
            let (a, b) = binomial_oracle(n);
            let g = gen(n as i64);
            assert_eq!(g.x(), &from_i128(&a), "x_{n}");
            assert_eq!(g.y(), &from_i128(&b), "y_{n}");
        }
    }

    #[test]
    fn constructor_rejects_non_solutions() {
        assert_eq!(PellPair::new(p(&[0, 1]), p(&[2])), Err(PellError::NotASolution));
        assert!(PellPair::new(p(&[1]), p(&[])).is_ok());
    }

    #[test]
    fn group_law_examples() {
        let a = gen(7);
        assert_eq!(group_add(&PellPair::identity(), &a), a);
        assert_eq!(group_add(&gen(2), &gen(3)), gen(5));
        assert_eq!(group_add(&gen(1), &gen(-1)), PellPair::identity());
    }

    #[test]
    fn powers() {
        for k in 0..12 {
            assert_eq!(group_pow(&gen(1), k), gen(k as i64));
        }
        assert_eq!(group_pow(&gen(9), 0), PellPair::identity());
        assert_eq!(group_pow(&gen(3), 35), gen(105));
        assert_eq!(group_pow_signed(&gen(2), -3), gen(-6));
    }

    #[test]
    fn recognition() {
        assert_eq!(recognize(&gen(1)), Some(PellIndex { n: 1.into(), epsilon: 1 }));
        assert_eq!(recognize(&PellPair::identity()), Some(PellIndex { n: 0.into(), epsilon: 1 }));
        let neg2 = PellPair::new(p(&[1, 0, -2]), p(&[0, 2])).unwrap();
        assert_eq!(recognize(&neg2), Some(PellIndex { n: 2.into(), epsilon: -1 }));
        assert_eq!(recognize(&gen(-5)), Some(PellIndex { n: (-5).into(), epsilon: 1 }));
        // (-1, 0) is -x_0.
        let m1 = PellPair::new(p(&[-1]), p(&[])).unwrap();
        assert_eq!(recognize(&m1), Some(PellIndex { n: 0.into(), epsilon: -1 }));
    }

    #[test]
    fn recognize_all_small() {
        for n in -200..=200 {
            let idx = recognize(&gen(n)).unwrap();
            assert_eq!(idx, PellIndex { n: n.into(), epsilon: 1 });
        }
    }

    #[test]
    fn symmetry_and_leading_coefficients() {
        let table = gen_table(200);
        for n in 1..=200usize {
            let neg = gen(-(n as i64));
            assert_eq!(neg.x(), table[n].x());
            assert_eq!(neg.y(), &-table[n].y());
            assert_eq!(
                table[n].y().leading().unwrap().to_integer(),
                BigInt::from(2).pow(n as u32 - 1)
            );
        }
        assert_eq!(y_leading(10), BigInt::from(512));
    }

    #[test]
    fn denef_properties() {
        assert!(check_denef_properties(1).pass);
        assert!(check_denef_properties(10).pass);
        assert!(check_denef_properties(60).pass);
    }

    #[test]
    fn pair_file_format() {
        let pair = PellPair::parse_pair("[-1, 0, 2]\n[0, 2]\n").unwrap();
        assert_eq!(pair, gen(2));
        assert_eq!(PellPair::parse_pair("[1]\n"), Err(PellError::PairFormat(1)));
        assert_eq!(PellPair::parse_pair(&gen(4).to_string()).unwrap(), gen(4));
    }

    fn arb_pair() -> impl Strategy<Value = PellPair> {
        (-15i64..15, any::<bool>()).prop_map(|(n, neg)| {
            let g = gen(n);
            if neg {
                g.negate()
            } else {
                g
            }
        })
    }

    proptest! {
        #[test]
        fn homomorphism(m in -50i64..=50, n in -50i64..=50) {
            prop_assert_eq!(group_add(&gen(m), &gen(n)), gen(m + n));
        }

        #[test]
        fn abelian_group(a in arb_pair(), b in arb_pair(), c in arb_pair()) {
            prop_assert_eq!(group_add(&group_add(&a, &b), &c), group_add(&a, &group_add(&b, &c)));
            prop_assert_eq!(group_add(&a, &b), group_add(&b, &a));
            prop_assert_eq!(group_add(&a, &PellPair::identity()), a.clone());
            prop_assert_eq!(group_add(&a, &a.inverse()), PellPair::identity());
        }

        #[test]
        fn pow_agrees_with_chain(n in -6i64..6, k in 0u64..20) {
            let a = gen(n);
            let chain = (0..k).fold(PellPair::identity(), |acc, _| group_add(&acc, &a));
            prop_assert_eq!(group_pow(&a, k), chain);
        }
    }
}
