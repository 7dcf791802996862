//! Exact arithmetic in ℚ(ζ_k) and the Galois machinery around
//! `L_k = ℚ(cos(2π/k))`.
//!
//! Elements are residues modulo the k-th cyclotomic polynomial in the power
//! basis `1, ζ, …, ζ^{φ(k)−1}`. In that basis the Galois action is a monomial
//! substitution `ζ ↦ ζ^a` and an element is rational exactly when all
//! non-constant coordinates vanish.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::polyring::{IntPoly, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("field mismatch: Q(zeta_{0}) vs Q(zeta_{1})")]
    FieldMismatch(u64, u64),
    #[error("{a} is not a unit modulo {k}")]
    NotAUnit { k: u64, a: i64 },
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u64),
    #[error("q too small: need q >= 2m + 3 (q = {q}, m = {m})")]
    QTooSmall { q: u64, m: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn euler_phi(k: u64) -> u64 {
    (1..=k).filter(|&a| a.gcd(&k) == 1).count() as u64
}

fn divisors(k: u64) -> Vec<u64> {
    (1..=k).filter(|d| k % d == 0).collect()
}

/// The k-th cyclotomic polynomial, by exact division of `z^k − 1` by `Φ_d`
/// over the proper divisors `d` of `k`.
pub fn cyclotomic_poly(k: u64) -> IntPoly {
    assert!(k >= 1, "k must be positive");
    let mut cache: HashMap<u64, IntPoly> = HashMap::new();
    for d in divisors(k) {
        let mut p = &IntPoly::monomial(d as usize) - &IntPoly::one();
        for e in divisors(d).into_iter().filter(|&e| e < d) {
            p = p.div_exact_monic(&cache[&e]).expect("Phi_e divides z^d - 1");
        }
        cache.insert(d, p);
    }
    cache.remove(&k).unwrap()
}

/// The field ℚ(ζ_k) with its defining modulus.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    k: u64,
    phi_k: IntPoly,
    modulus: RatPoly,
}

impl CycloField {
    pub fn new(k: u64) -> Arc<Self> {
        let phi_k = cyclotomic_poly(k);
        let modulus = phi_k.to_rat();
        Arc::new(CycloField { k, phi_k, modulus })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn phi_k(&self) -> &IntPoly {
        &self.phi_k
    }

    /// `[ℚ(ζ_k) : ℚ] = φ(k)`.
    pub fn degree(&self) -> usize {
        self.phi_k.degree() as usize
    }
}

/// An element of ℚ(ζ_k).
#[derive(Debug, Clone)]
pub struct CycloElem {
    field: Arc<CycloField>,
    coords: RatPoly,
}

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.k == other.field.k && self.coords == other.coords
    }
}

impl Eq for CycloElem {}

impl CycloElem {
    /// Reduces an arbitrary polynomial in ζ.
    pub fn from_poly(field: &Arc<CycloField>, p: &RatPoly) -> Self {
        CycloElem {
            field: field.clone(),
            coords: p.rem(&field.modulus).expect("modulus is nonzero"),
        }
    }

    pub fn rational(field: &Arc<CycloField>, c: BigRational) -> Self {
        Self::from_poly(field, &RatPoly::constant(c))
    }

    pub fn zero(field: &Arc<CycloField>) -> Self {
        Self::from_poly(field, &RatPoly::zero())
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_poly(field, &RatPoly::one())
    }

    /// `ζ^j` for any integer `j`.
    pub fn zeta_pow(field: &Arc<CycloField>, j: i64) -> Self {
        let e = j.rem_euclid(field.k as i64) as usize;
        Self::from_poly(field, &IntPoly::monomial(e).to_rat())
    }

    pub fn k(&self) -> u64 {
        self.field.k
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// Power-basis coordinates (degree < φ(k)).
    pub fn coords(&self) -> &RatPoly {
        &self.coords
    }

    /// Coordinate vector of length φ(k).
    pub fn coord_vector(&self) -> Vec<BigRational> {
        (0..self.field.degree()).map(|i| self.coords.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    fn check(&self, other: &Self) -> Result<(), CycloError> {
        if self.field.k == other.field.k {
            Ok(())
        } else {
            Err(CycloError::FieldMismatch(self.field.k, other.field.k))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        Ok(CycloElem {
            field: self.field.clone(),
            coords: &self.coords + &other.coords,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        Ok(CycloElem {
            field: self.field.clone(),
            coords: &self.coords - &other.coords,
        })
    }

    pub fn neg(&self) -> Self {
        CycloElem {
            field: self.field.clone(),
            coords: -&self.coords,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        Ok(Self::from_poly(&self.field, &(&self.coords * &other.coords)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycloElem {
            field: self.field.clone(),
            coords: self.coords.scale(c),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(&self.field), |acc, _| acc.mul(self).expect("same field"))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_k`.
    pub fn inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero(self.field.k));
        }
        // Φ_k is irreducible, so the gcd is 1.
        let (g, s, _) = RatPoly::ext_gcd(&self.coords, &self.field.modulus);
        debug_assert!(g.is_one());
        Ok(Self::from_poly(&self.field, &s))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycloError> {
        self.mul(&other.inverse()?)
    }

    /// The rational value, if the element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coords.as_constant()
    }

    /// Image under `ζ_k ↦ ζ_K^{K/k}` in ℚ(ζ_K), for `k | K`.
    pub fn embed(&self, target: &Arc<CycloField>) -> Result<Self, CycloError> {
        if target.k % self.field.k != 0 {
            return Err(CycloError::Precondition(format!(
                "{} does not divide {}",
                self.field.k, target.k
            )));
        }
        let step = (target.k / self.field.k) as usize;
        let mut c = vec![BigRational::zero(); self.coords.coeffs().len() * step + 1];
        for (j, cj) in self.coords.coeffs().iter().enumerate() {
            c[j * step] = cj.clone();
        }
        Ok(Self::from_poly(target, &RatPoly::new(c)))
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coords)
    }
}

/// `cos(2πa/k) = (ζ^a + ζ^{−a})/2` in ℚ(ζ_k).
pub fn cos_elem_in(field: &Arc<CycloField>, a: i64) -> CycloElem {
    let s = CycloElem::zeta_pow(field, a)
        .add(&CycloElem::zeta_pow(field, -a))
        .expect("same field");
    s.scale(&BigRational::new(1.into(), 2.into()))
}

pub fn cos_elem(k: u64, a: i64) -> Result<CycloElem, CycloError> {
    if k < 3 {
        return Err(CycloError::Precondition(format!("k = {k} < 3")));
    }
    Ok(cos_elem_in(&CycloField::new(k), a))
}

/// `is_rational` as a pair: the flag and the value when it holds.
pub fn is_rational(e: &CycloElem) -> (bool, Option<BigRational>) {
    let v = e.as_rational();
    (v.is_some(), v)
}

/// Horner evaluation of a rational polynomial at a field element.
pub fn eval_poly_at(f: &RatPoly, at: &CycloElem) -> CycloElem {
    let field = at.field();
    f.coeffs().iter().rev().fold(CycloElem::zero(field), |acc, c| {
        acc.mul(at)
            .expect("same field")
            .add(&CycloElem::rational(field, c.clone()))
            .expect("same field")
    })
}

/// `F(cos(2πa/k))` in ℚ(ζ_k).
pub fn eval_poly_at_cos(f: &RatPoly, k: u64, a: i64) -> Result<CycloElem, CycloError> {
    Ok(eval_poly_at(f, &cos_elem(k, a)?))
}

/// Minimal polynomial over ℚ (monic), from the first linear dependency among
/// `1, e, e², …`.
pub fn minimal_polynomial(e: &CycloElem) -> RatPoly {
    let n = e.field().degree();
    let mut powers = vec![CycloElem::one(e.field()).coord_vector()];
    let mut cur = CycloElem::one(e.field());
    loop {
        cur = cur.mul(e).expect("same field");
        powers.push(cur.coord_vector());
        let cols = powers.len();
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| powers.iter().map(|p| p[i].clone()).collect())
            .collect();
        if let Some(v) = linalg::nullspace(&rows, cols).into_iter().next() {
            // Only the newest column can be free, and it carries the 1.
            return RatPoly::new(v).monic();
        }
    }
}

/// A class `a ∈ (ℤ/kℤ)^×/(±1)`, acting by `σ_a : ζ ↦ ζ^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GaloisElement {
    k: u64,
    a: u64,
}

impl GaloisElement {
    pub fn new(k: u64, a: i64) -> Result<Self, CycloError> {
        let r = a.rem_euclid(k as i64) as u64;
        if r.gcd(&k) != 1 {
            return Err(CycloError::NotAUnit { k, a });
        }
        Ok(GaloisElement { k, a: r.min(k - r) })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Canonical representative in `1..=k/2`.
    pub fn rep(&self) -> u64 {
        self.a
    }

    pub fn compose(&self, other: &Self) -> Result<Self, CycloError> {
        if self.k != other.k {
            return Err(CycloError::FieldMismatch(self.k, other.k));
        }
        Self::new(self.k, ((self.a * other.a) % self.k) as i64)
    }

    /// Class of the reduction modulo a divisor `d` of `k`.
    pub fn reduce(&self, d: u64) -> Result<Self, CycloError> {
        Self::new(d, (self.a % d) as i64)
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 || self.k <= 2
    }
}

/// Applies `σ_a : ζ ↦ ζ^a`. On the real subfield the sign of `a` is
/// irrelevant; on ℚ(ζ_k) the canonical representative is used.
pub fn galois_apply(sigma: &GaloisElement, e: &CycloElem) -> Result<CycloElem, CycloError> {
    if sigma.k != e.k() {
        return Err(CycloError::FieldMismatch(sigma.k, e.k()));
    }
    let k = sigma.k as usize;
    let mut c = vec![BigRational::zero(); k];
    for (j, cj) in e.coords().coeffs().iter().enumerate() {
        c[(j * sigma.a as usize) % k] += cj;
    }
    Ok(CycloElem::from_poly(e.field(), &RatPoly::new(c)))
}

/// `G_k = (ℤ/kℤ)^×/(±1)`, sorted by representative.
pub fn galois_group(k: u64) -> Vec<GaloisElement> {
    let set: BTreeSet<GaloisElement> = (1..k.max(2))
        .filter(|a| a.gcd(&k) == 1)
        .map(|a| GaloisElement::new(k, a as i64).unwrap())
        .collect();
    set.into_iter().collect()
}

/// Kernel of the reduction `G_{pq} → G_q`.
pub fn galois_kernel(p: u64, q: u64) -> Result<Vec<GaloisElement>, CycloError> {
    if !is_prime(p) || !is_prime(q) || p == q {
        return Err(CycloError::Precondition(format!(
            "p = {p}, q = {q} must be distinct primes"
        )));
    }
    let k = p * q;
    Ok(galois_group(k)
        .into_iter()
        .filter(|g| g.reduce(q).map(|r| r.is_identity()).unwrap_or(false))
        .collect())
}

/// Representatives `a ∈ {1, …, (k−1)/2}` of the kernel classes: the indices
/// with `σ_a(cos(2π/k)) = cos(2πa/k)` for `σ_a` in the kernel.
pub fn kernel_orbit(p: u64, q: u64) -> Result<Vec<u64>, CycloError> {
    Ok(galois_kernel(p, q)?.iter().map(GaloisElement::rep).collect())
}

/// Rank over ℚ(ζ_{2q}) of `[cos^b(πa/q)]` for `1 ≤ a ≤ (q−1)/2`, `0 ≤ b ≤ m`.
///
/// Bareiss elimination; the exact division by the previous pivot is a
/// multiplication by its inverse in the field.
pub fn vandermonde_rank(q: u64, m: u64) -> Result<usize, CycloError> {
    if q < 2 * m + 3 {
        return Err(CycloError::QTooSmall { q, m });
    }
    if !is_prime(q) {
        return Err(CycloError::Precondition(format!("q = {q} is not prime")));
    }
    let field = CycloField::new(2 * q);
    let mut mat: Vec<Vec<CycloElem>> = (1..=(q - 1) / 2)
        .map(|a| {
            let c = cos_elem_in(&field, a as i64);
            (0..=m).map(|b| c.pow(b as u32)).collect()
        })
        .collect();
    Ok(bareiss_rank(&mut mat, (m + 1) as usize, &field))
}

fn bareiss_rank(mat: &mut [Vec<CycloElem>], ncols: usize, field: &Arc<CycloField>) -> usize {
    let nrows = mat.len();
    let mut prev = CycloElem::one(field);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        let prev_inv = prev.inverse().expect("pivots are nonzero");
        let pivot_row = mat[rank].clone();
        for row in mat.iter_mut().skip(rank + 1) {
            let e = row[col].clone();
            for (j, cell) in row.iter_mut().enumerate().skip(col) {
                let t = pivot_row[col]
                    .mul(cell)
                    .and_then(|x| x.sub(&e.mul(&pivot_row[j])?))
                    .and_then(|x| x.mul(&prev_inv))
                    .expect("same field");
                *cell = t;
            }
        }
        prev = pivot_row[col].clone();
        rank += 1;
    }
    rank
}

/// Result of [`rationality_nullspace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullspaceReport {
    pub k: u64,
    pub m: u64,
    pub dimension: usize,
    pub basis: Vec<RatPoly>,
    /// Number of ℚ-linear constraints assembled.
    pub constraints: usize,
}

/// Finds a factorization `k = p·q` into distinct primes with `p > m + 1`
/// and `q > 2(m + 1)`.
pub fn admissible_factorization(k: u64, m: u64) -> Option<(u64, u64)> {
    (2..k)
        .filter(|&p| k % p == 0)
        .map(|p| (p, k / p))
        .find(|&(p, q)| p != q && is_prime(p) && is_prime(q) && p > m + 1 && q > 2 * (m + 1))
}

/// The ℚ-space of `F` with `deg F ≤ m` and `F(cos(2πa/k)) ∈ ℚ` for every
/// `a = 1, …, k−1`.
///
/// Each value is a ℚ-linear function of the coefficients of `F`; asking it
/// to be rational means its `φ(k) − 1` non-constant coordinates vanish. The
/// resulting homogeneous system is solved exactly.
pub fn rationality_nullspace(k: u64, m: u64) -> Result<NullspaceReport, CycloError> {
    if admissible_factorization(k, m).is_none() {
        return Err(CycloError::Precondition(format!(
            "k = {k} is not p*q with p > {} and q > {}",
            m + 1,
            2 * (m + 1)
        )));
    }
    let field = CycloField::new(k);
    let phi = field.degree();
    let ncols = (m + 1) as usize;
    let mut rows = Vec::new();
    for a in 1..k as i64 {
        let c = cos_elem_in(&field, a);
        let mut powers = Vec::with_capacity(ncols);
        let mut cur = CycloElem::one(&field);
        for _ in 0..ncols {
            powers.push(cur.coord_vector());
            cur = cur.mul(&c).expect("same field");
        }
        for j in 1..phi {
            rows.push(powers.iter().map(|v| v[j].clone()).collect::<Vec<_>>());
        }
    }
    let constraints = rows.len();
    let basis: Vec<RatPoly> = linalg::nullspace(&rows, ncols)
        .into_iter()
        .map(RatPoly::new)
        .collect();
    Ok(NullspaceReport {
        k,
        m,
        dimension: basis.len(),
        basis,
        constraints,
    })
}

/// Helper used by tests and the CLI: the integer value of `φ(k)/2`.
pub fn real_subfield_degree(k: u64) -> u64 {
    if k <= 2 {
        1
    } else {
        euler_phi(k) / 2
    }
}
