//! Floating-point evaluation of the transcendental Pell solutions
//! `x + y·w = ε·(z + w)^n·exp(h·w)` and estimation of their growth order.
//!
//! With `ζ = h(z)·w` the pair is
//!
//! ```text
//! x = ε·(x_n·cosh ζ + y_n·w·sinh ζ)
//! y = ε·(y_n·cosh ζ + x_n·sinh ζ / w)
//! ```
//!
//! which is even in `w`, so the choice of square root of `z² − 1` does not
//! matter. Since `x_n ± y_n·w = (z ± w)^n` and `(z + w)(z − w) = 1`, this is
//! also `x = ε·cosh P`, `y = ε·sinh P / w` with `P = n·log(z + w) + ζ`.
//! Magnitudes are computed from that form as logarithms and never
//! exponentiated; the polynomial parts never cancel against each other.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::pell::gen;
use crate::polyring::RatPoly;

/// Points with `|z|` at or below this are rejected.
pub const MIN_RADIUS: f64 = 1.5;

/// Angular samples per circle in [`estimate_order`].
pub const ANGLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("|z| = {0} is too close to branch points (need |z| > {MIN_RADIUS})")]
    TooClose(f64),
    #[error("overflow at z = {0}; use a smaller radius")]
    Overflow(Complex64),
    #[error("{0}")]
    BadArgs(String),
    #[error("log max modulus {log_m} at r = {r} is not positive; the order fit is undefined")]
    Degenerate { r: f64, log_m: f64 },
}

/// Which square root of `z² − 1` to use for `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Principal,
    Negated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSpec {
    pub n: i64,
    pub h: RatPoly,
    pub epsilon: i8,
}

impl SolutionSpec {
    pub fn new(n: i64, h: RatPoly) -> Self {
        SolutionSpec { n, h, epsilon: 1 }
    }

    pub fn with_sign(mut self, epsilon: i8) -> Self {
        self.epsilon = if epsilon < 0 { -1 } else { 1 };
        self
    }

    fn numeric(&self) -> NumericSpec {
        let p = gen(self.n);
        NumericSpec {
            x_n: to_f64s(p.x()),
            y_n: to_f64s(p.y()),
            h: to_f64s(&self.h),
            eps: f64::from(self.epsilon),
            n: self.n as f64,
        }
    }
}

impl fmt::Display for SolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n = {}, h = {}, eps = {}", self.n, self.h, self.epsilon)
    }
}

fn to_f64s(p: &RatPoly) -> Vec<f64> {
    p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
}

fn horner(cs: &[f64], z: Complex64) -> Complex64 {
    cs.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

struct NumericSpec {
    x_n: Vec<f64>,
    y_n: Vec<f64>,
    h: Vec<f64>,
    eps: f64,
    n: f64,
}

fn sqrt_branch(z: Complex64, branch: Branch) -> Complex64 {
    let w = (z * z - 1.0).sqrt();
    match branch {
        Branch::Principal => w,
        Branch::Negated => -w,
    }
}

/// `(log|cosh P|, log|sinh P|)` from `|Re P|` and a bounded correction.
fn log_cosh_sinh(p: Complex64) -> (f64, f64) {
    let s = if p.re > 0.0 || (p.re == 0.0 && p.im >= 0.0) { 1.0 } else { -1.0 };
    let pp = p * s;
    let e = (-2.0 * pp).exp();
    (pp.re + (1.0 + e).norm().ln() - LN_2, pp.re + (1.0 - e).norm().ln() - LN_2)
}

impl NumericSpec {
    fn log_magnitudes(&self, z: Complex64, branch: Branch) -> (f64, f64) {
        let w = sqrt_branch(z, branch);
        // log(z + w), taken from whichever factor is not subject to cancellation
        let (plus, minus) = (z + w, z - w);
        let l = if plus.norm() >= minus.norm() { plus.ln() } else { -minus.ln() };
        let p = l * self.n + horner(&self.h, z) * w;
        let (lc, ls) = log_cosh_sinh(p);
        (lc, ls - w.norm().ln())
    }

    fn direct(&self, z: Complex64) -> (Complex64, Complex64) {
        let w = sqrt_branch(z, Branch::Principal);
        let zeta = horner(&self.h, z) * w;
        let (u, v) = (zeta.cosh(), zeta.sinh() / w);
        let (xn, yn) = (horner(&self.x_n, z), horner(&self.y_n, z));
        let x = (xn * u + (z * z - 1.0) * yn * v) * self.eps;
        let y = (yn * u + xn * v) * self.eps;
        (x, y)
    }
}

fn check_point(z: Complex64) -> Result<(), GrowthError> {
    if z.norm() <= MIN_RADIUS {
        Err(GrowthError::TooClose(z.norm()))
    } else {
        Ok(())
    }
}

/// `(log|x(z)|, log|y(z)|)` on the principal branch.
pub fn eval_log_magnitude(spec: &SolutionSpec, z: Complex64) -> Result<(f64, f64), GrowthError> {
    eval_log_magnitude_branch(spec, z, Branch::Principal)
}

pub fn eval_log_magnitude_branch(
    spec: &SolutionSpec,
    z: Complex64,
    branch: Branch,
) -> Result<(f64, f64), GrowthError> {
    check_point(z)?;
    Ok(spec.numeric().log_magnitudes(z, branch))
}

/// `max |x² − (z² − 1)·y² − 1| / (1 + |x|²)` over the samples, evaluated
/// directly in double precision.
pub fn pell_residual(spec: &SolutionSpec, samples: &[Complex64]) -> Result<f64, GrowthError> {
    let ns = spec.numeric();
    let mut worst: f64 = 0.0;
    for &z in samples {
        check_point(z)?;
        let (x, y) = ns.direct(z);
        let r = (x * x - (z * z - 1.0) * y * y - 1.0).norm() / (1.0 + x.norm_sqr());
        if !r.is_finite() || !x.norm().is_finite() || !y.norm().is_finite() {
            return Err(GrowthError::Overflow(z));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// `count` points evenly spaced on the circle `|z| = r`.
pub fn circle(r: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / count as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub rho_hat: f64,
    pub residual_fit: f64,
    pub radii: Vec<f64>,
    #[serde(rename = "logM")]
    pub log_m: Vec<f64>,
}

/// Least-squares slope of `log log M(r)` against `log r` over log-spaced
/// radii, with `M(r)` the maximum of `|y|` over [`ANGLES`] points.
pub fn estimate_order(spec: &SolutionSpec, r_min: f64, r_max: f64, count: usize) -> Result<OrderEstimate, GrowthError> {
    if !(r_min > MIN_RADIUS && r_min < r_max && r_max.is_finite()) {
        return Err(GrowthError::BadArgs(format!(
            "need {MIN_RADIUS} < r_min < r_max, got r_min = {r_min}, r_max = {r_max}"
        )));
    }
    if count < 8 {
        return Err(GrowthError::BadArgs(format!("count must be at least 8, got {count}")));
    }
    let ns = spec.numeric();
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let radii: Vec<f64> = (0..count)
        .map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp())
        .collect();
    let mut log_m = Vec::with_capacity(count);
    for &r in &radii {
        let m = circle(r, ANGLES)
            .into_iter()
            .map(|z| ns.log_magnitudes(z, Branch::Principal).1)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(m > 0.0) || !m.is_finite() {
            return Err(GrowthError::Degenerate { r, log_m: m });
        }
        log_m.push(m);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = log_m.iter().map(|m| m.ln()).collect();
    let (slope, residual_fit) = fit_line(&xs, &ys);
    Ok(OrderEstimate {
        rho_hat: slope,
        residual_fit,
        radii,
        log_m,
    })
}

/// Slope and root-mean-square residual of the least-squares line.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(n: i64, h: &[i64]) -> SolutionSpec {
        SolutionSpec::new(n, RatPoly::from_i64s(h))
    }

    #[test]
    fn polynomial_case() {
        let (_, ly) = eval_log_magnitude(&spec(2, &[]), c(10.0, 0.0)).unwrap();
        assert!((ly - 20f64.ln()).abs() < 1e-12);
        let (lx, _) = eval_log_magnitude(&spec(2, &[]), c(10.0, 0.0)).unwrap();
        assert!((lx - 199f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sinh_asymptotics() {
        let z = c(50.0, 0.0);
        let (_, ly) = eval_log_magnitude(&spec(0, &[1]), z).unwrap();
        let w = (z * z - 1.0).sqrt();
        // y = sinh(w)/w
        let want = w.re - LN_2 - w.norm().ln();
        assert!((ly - want).abs() < 1e-9, "{ly} vs {want}");
        assert!(ly > 45.0 && ly < 50.0);
    }

    #[test]
    fn agrees_with_direct_evaluation() {
        for s in [spec(1, &[1]), spec(3, &[0, 1]), spec(2, &[1, 0, 1]).with_sign(-1)] {
            let ns = s.numeric();
            for z in circle(2.5, 17) {
                let (x, y) = ns.direct(z);
                let (lx, ly) = eval_log_magnitude(&s, z).unwrap();
                assert!((lx - x.norm().ln()).abs() < 1e-9, "{s} at {z}");
                assert!((ly - y.norm().ln()).abs() < 1e-9, "{s} at {z}");
            }
        }
    }

    #[test]
    fn branch_independence() {
        for s in [spec(1, &[1]), spec(0, &[0, 1]), spec(2, &[0, 0, 1]), spec(-3, &[2, -1])] {
            for r in [2.0, 30.0, 4000.0] {
                for z in circle(r, 31) {
                    let a = eval_log_magnitude_branch(&s, z, Branch::Principal).unwrap();
                    let b = eval_log_magnitude_branch(&s, z, Branch::Negated).unwrap();
                    assert!((a.0 - b.0).abs() <= 1e-10 * a.0.abs().max(1.0), "{s} {z} {a:?} {b:?}");
                    assert!((a.1 - b.1).abs() <= 1e-10 * a.1.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn residuals() {
        assert!(pell_residual(&spec(5, &[]), &circle(4.0, 100)).unwrap() < 1e-9);
        assert!(pell_residual(&spec(1, &[0, 1]), &circle(3.0, 64)).unwrap() < 1e-6);
        assert_eq!(pell_residual(&spec(0, &[]), &circle(3.0, 16)).unwrap(), 0.0);
        assert!(matches!(
            pell_residual(&spec(0, &[0, 0, 1]), &circle(1e4, 4)),
            Err(GrowthError::Overflow(_))
        ));
        assert!(matches!(eval_log_magnitude(&spec(1, &[]), c(1.0, 0.5)), Err(GrowthError::TooClose(_))));
    }

    #[test]
    fn orders() {
        let e = estimate_order(&spec(1, &[1]), 10.0, 1e4, 12).unwrap();
        assert!((e.rho_hat - 1.0).abs() < 0.25, "{}", e.rho_hat);
        let e = estimate_order(&spec(0, &[0, 1]), 10.0, 1e3, 12).unwrap();
        assert!((e.rho_hat - 2.0).abs() < 0.25, "{}", e.rho_hat);
        let e = estimate_order(&spec(2, &[0, 0, 1]), 10.0, 1e4, 12).unwrap();
        assert!((e.rho_hat - 3.0).abs() < 0.25, "{}", e.rho_hat);
        let e = estimate_order(&spec(7, &[]), 10.0, 1e4, 12).unwrap();
        assert!(e.rho_hat < 0.5, "{}", e.rho_hat);
        let last = e.radii.len() - 1;
        // deg y_7 = 6 with leading coefficient 2^6
        let r = e.radii[last];
        assert!((e.log_m[last] - (64.0 * r.powi(6)).ln()).abs() < 1e-6);
    }

    #[test]
    fn order_increases_with_degree_of_h() {
        let rho = |h: &[i64]| estimate_order(&spec(1, h), 10.0, 1e4, 10).unwrap().rho_hat;
        let (r0, r1, r2) = (rho(&[1]), rho(&[0, 1]), rho(&[0, 0, 1]));
        assert!(r1 > r0 + 0.75 && r2 > r1 + 0.75, "{r0} {r1} {r2}");
        // deg h = 1 already leaves order 1
        assert!(r1 > 1.5);
    }

    #[test]
    fn order_arguments() {
        assert!(estimate_order(&spec(1, &[1]), 1.0, 10.0, 8).is_err());
        assert!(estimate_order(&spec(1, &[1]), 10.0, 5.0, 8).is_err());
        assert!(estimate_order(&spec(1, &[1]), 10.0, 50.0, 3).is_err());
        assert!(matches!(
            estimate_order(&spec(0, &[]), 10.0, 50.0, 8),
            Err(GrowthError::Degenerate { .. })
        ));
    }
}
