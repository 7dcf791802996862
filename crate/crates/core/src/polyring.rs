//! Exact dense univariate polynomials over ℤ and ℚ.
//!
//! Coefficients are stored little-endian: index `i` holds the coefficient of
//! `z^i`. Both [`IntPoly`] and [`RatPoly`] keep the highest stored
//! coefficient nonzero, so the zero polynomial is the empty vector and
//! structural equality is mathematical equality. The zero polynomial has
//! degree `-1`.
//!
//! The module also hosts [`QuintAlgebraElem`], the algebra
//! `ℚ[z][x]/(x⁵ − (t² − 1))` used to certify the constancy atom
//! `t·t = s⁵ + 1` exactly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("algebra mismatch: base {0} vs {1}")]
    AlgebraMismatch(BigRational, BigRational),
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Parses a rational literal: `n` or `p/q`, optional sign.
pub fn parse_rational(s: &str) -> Result<BigRational, PolyError> {
    let s = s.trim();
    let bad = || PolyError::Parse(format!("bad rational literal `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(PolyError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats a rational as `n` or `p/q`.
pub fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_list(s: &str) -> Result<Vec<BigRational>, PolyError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| PolyError::Parse(format!("expected `[c0, c1, ...]`, got `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(parse_rational).collect()
}

// ---------------------------------------------------------------------------
// IntPoly
// ---------------------------------------------------------------------------

/// Polynomial with arbitrary-precision integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        IntPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64s(&[1])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, c: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, k| acc * c + k)
    }

    /// Exact division by a monic polynomial, `None` if it leaves a remainder.
    pub fn div_exact_monic(&self, b: &IntPoly) -> Option<IntPoly> {
        assert!(b.is_monic(), "divisor must be monic");
        let (q, r) = int_div_rem_monic(&self.coeffs, &b.coeffs);
        r.is_empty().then(|| IntPoly::new(q))
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        }
    }
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn int_div_rem_monic(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = std::mem::take(&mut r[i + db]);
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b[..db].iter().enumerate() {
            if !bj.is_zero() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::new(int_mul(&self.coeffs, &rhs.coeffs))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// RatPoly
// ---------------------------------------------------------------------------

/// Polynomial with arbitrary-precision rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        trim(&mut coeffs);
        RatPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Index of the highest nonzero coefficient, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// The constant value, if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// The integer-coefficient polynomial, if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, c: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, k| acc * c + k)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        if c.is_zero() {
            return RatPoly::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|k| k * c).collect(),
        }
    }

    /// Multiplication by `z^n`.
    pub fn shift(&self, n: usize) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        RatPoly { coeffs }
    }

    /// Drops every coefficient of degree ≥ `n` (reduction modulo `z^n`).
    pub fn truncate(&self, n: usize) -> RatPoly {
        RatPoly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn pow(&self, mut e: u64) -> RatPoly {
        let mut base = self.clone();
        let mut acc = RatPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer numerators over a common denominator.
    fn scaled_ints(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    /// Long division: `self = q·b + r` with `deg r < deg b`.
    pub fn div_rem(&self, b: &RatPoly) -> Result<(RatPoly, RatPoly), PolyError> {
        let lead = b.leading().ok_or(PolyError::ZeroDivisor)?;
        if self.coeffs.len() < b.coeffs.len() {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let inv = lead.recip();
        let db = b.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let top = std::mem::take(&mut r[i + db]);
            if top.is_zero() {
                continue;
            }
            let qi = top * &inv;
            for (j, bj) in b.coeffs[..db].iter().enumerate() {
                if !bj.is_zero() {
                    r[i + j] -= &qi * bj;
                }
            }
            q[i] = qi;
        }
        r.truncate(db);
        Ok((RatPoly::new(q), RatPoly::new(r)))
    }

    /// Exact quotient `self / b`, `None` when `b` does not divide `self`.
    pub fn div_exact(&self, b: &RatPoly) -> Result<Option<RatPoly>, PolyError> {
        let (q, r) = self.div_rem(b)?;
        Ok(r.is_zero().then_some(q))
    }

    /// Remainder only.
    pub fn rem(&self, b: &RatPoly) -> Result<RatPoly, PolyError> {
        Ok(self.div_rem(b)?.1)
    }

    /// Scales to the monic associate (zero stays zero).
    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => RatPoly::zero(),
        }
    }

    /// Extended Euclid: `(g, s, t)` with `s·a + t·b = g`, `g` monic (or zero).
    pub fn ext_gcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (r0, s0, t0),
        }
    }
}

/// True iff `b` divides `a` in ℚ[z] (equivalently in ℂ[z] for rational inputs).
pub fn divides_exactly(b: &RatPoly, a: &RatPoly) -> Result<bool, PolyError> {
    Ok(a.rem(b)?.is_zero())
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        RatPoly::new(coeffs)
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, BigRational::zero());
        for (c, s) in coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= s;
        }
        RatPoly::new(coeffs)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        // Multiply integer numerators, then divide by the denominators once.
        let (a, da) = self.scaled_ints();
        let (b, db) = rhs.scaled_ints();
        let den = da * db;
        let prod = int_mul(&a, &b);
        RatPoly::new(
            prod.into_iter()
                .map(|n| BigRational::new(n, den.clone()))
                .collect(),
        )
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(RatPoly);
owned_ops!(IntPoly);

impl From<&IntPoly> for RatPoly {
    fn from(p: &IntPoly) -> Self {
        p.to_rat()
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(c))?;
        }
        write!(f, "]")
    }
}

impl FromStr for RatPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(RatPoly::new)
    }
}

impl FromStr for IntPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RatPoly::from_str(s)?
            .to_int()
            .ok_or_else(|| PolyError::Parse(format!("non-integer coefficient in `{}`", s.trim())))
    }
}

// ---------------------------------------------------------------------------
// Quintic quotient algebra
// ---------------------------------------------------------------------------

/// An element `c0 + c1·x + … + c4·x⁴` of `ℚ[z][x]/(x⁵ − (t² − 1))`.
///
/// With constant coordinates this is the rational algebra carrying the
/// fifth-root witness `s` for `t·t = s⁵ + 1`; the generator satisfies that
/// identity by construction for every rational `t`. When `t = ±1` the
/// generator is nilpotent; nothing special is needed for that case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuintAlgebraElem {
    base: BigRational,
    coords: [RatPoly; 5],
}

impl QuintAlgebraElem {
    pub fn new(base: BigRational, coords: [BigRational; 5]) -> Self {
        Self::from_polys(base, coords.map(RatPoly::constant))
    }

    pub fn from_polys(base: BigRational, coords: [RatPoly; 5]) -> Self {
        QuintAlgebraElem { base, coords }
    }

    /// The class of `x`, a fifth root of `t² − 1`.
    pub fn generator(base: BigRational) -> Self {
        let mut c: [BigRational; 5] = Default::default();
        c[1] = BigRational::one();
        Self::new(base, c)
    }

    /// Embeds a polynomial as a scalar of the algebra.
    pub fn scalar(base: BigRational, p: RatPoly) -> Self {
        let mut coords: [RatPoly; 5] = Default::default();
        coords[0] = p;
        Self::from_polys(base, coords)
    }

    pub fn base(&self) -> &BigRational {
        &self.base
    }

    pub fn coords(&self) -> &[RatPoly; 5] {
        &self.coords
    }

    /// `t² − 1`, the value of `x⁵`.
    pub fn fifth_power_value(&self) -> BigRational {
        &self.base * &self.base - BigRational::one()
    }

    /// The underlying polynomial if the element lies in the scalar subring.
    pub fn as_scalar(&self) -> Option<&RatPoly> {
        self.coords[1..]
            .iter()
            .all(RatPoly::is_zero)
            .then_some(&self.coords[0])
    }

    /// The rational coordinates if every coordinate is a constant.
    pub fn rational_coords(&self) -> Option<[BigRational; 5]> {
        let mut out: [BigRational; 5] = Default::default();
        for (o, c) in out.iter_mut().zip(&self.coords) {
            *o = c.as_constant()?;
        }
        Some(out)
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(PolyError::AlgebraMismatch(self.base.clone(), other.base.clone()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let coords = std::array::from_fn(|i| &self.coords[i] + &other.coords[i]);
        Ok(Self::from_polys(self.base.clone(), coords))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_polys(self.base.clone(), self.coords.clone().map(|c| -c))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut prod: [RatPoly; 9] = Default::default();
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = &prod[i + j] + &(a * b);
                }
            }
        }
        let fold = RatPoly::constant(self.fifth_power_value());
        let mut coords: [RatPoly; 5] = Default::default();
        for (i, c) in prod.into_iter().enumerate() {
            if i < 5 {
                coords[i] = &coords[i] + &c;
            } else {
                coords[i - 5] = &coords[i - 5] + &(&c * &fold);
            }
        }
        Ok(Self::from_polys(self.base.clone(), coords))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::scalar(self.base.clone(), RatPoly::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same algebra");
        }
        acc
    }
}

impl fmt::Display for QuintAlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational_coords() {
            Some(cs) => {
                let cs: Vec<String> = cs.iter().map(format_rational).collect();
                write!(f, "quint({}, [{}])", format_rational(&self.base), cs.join(", "))
            }
            None => {
                let cs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
                write!(f, "quintpoly({}, [{}])", format_rational(&self.base), cs.join(", "))
            }
        }
    }
}
