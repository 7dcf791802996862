//! Choice of the constants `m, p, q, k` from an order bound `ρ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::is_prime;
use crate::polyring::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("rho must be nonnegative, got {0}")]
    Negative(String),
    #[error("rho = {0} is too large")]
    TooLarge(String),
    #[error("bad rho literal: {0}")]
    Parse(String),
}

/// `m = 2(⌊ρ⌋ + 1)`, `p` the least prime `> m + 1`, `q` the least prime
/// `> 2(m + 1)`, `k = p·q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSet {
    #[serde(serialize_with = "ser_rational")]
    pub rho: BigRational,
    pub m: u64,
    pub p: u64,
    pub q: u64,
    pub k: u64,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_rational(r))
}

fn next_prime_above(n: u64) -> u64 {
    (n + 1..).find(|&c| is_prime(c)).expect("primes are unbounded")
}

pub fn select_params(rho: &BigRational) -> Result<ParamSet, ParamsError> {
    if rho.is_negative() {
        return Err(ParamsError::Negative(format_rational(rho)));
    }
    let fl: BigInt = rho.floor().to_integer();
    let m = fl
        .to_u64()
        .filter(|&f| f < 1 << 20)
        .map(|f| 2 * (f + 1))
        .ok_or_else(|| ParamsError::TooLarge(format_rational(rho)))?;
    let p = next_prime_above(m + 1);
    let q = next_prime_above(2 * (m + 1));
    Ok(ParamSet {
        rho: rho.clone(),
        m,
        p,
        q,
        k: p * q,
    })
}

/// Convenience: parses `p/q` (or an integer) and selects.
pub fn select_params_str(rho: &str) -> Result<ParamSet, ParamsError> {
    let r = parse_rational(rho).map_err(|e| ParamsError::Parse(e.to_string()))?;
    select_params(&r)
}

impl ParamSet {
    /// Convenience for `ρ = 0`: `k = 35`.
    pub fn rho_zero() -> Self {
        select_params_str("0").expect("valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(rho: &str) -> (u64, u64, u64, u64) {
        let p = select_params_str(rho).unwrap();
        (p.m, p.p, p.q, p.k)
    }

    #[test]
    fn reference_choices() {
        assert_eq!(ps("0"), (2, 5, 7, 35));
        assert_eq!(ps("1"), (4, 7, 11, 77));
        assert_eq!(ps("5/2"), (6, 11, 17, 187));
        assert_eq!(ps("1/2"), ps("0"));
        assert_eq!(ps("99/100"), ps("0"));
    }

    #[test]
    fn invariants_on_grid() {
        let mut last_k = 0;
        for twice in 0..=20i64 {
            let rho = BigRational::new(twice.into(), 2.into());
            let p = select_params(&rho).unwrap();
            let fl = (twice / 2) as u64;
            assert_eq!(p.m, 2 * (fl + 1));
            assert!(is_prime(p.p) && is_prime(p.q));
            assert!(p.p > p.m + 1 && p.q > 2 * (p.m + 1));
            assert_ne!(p.p, p.q);
            assert_eq!(p.k, p.p * p.q);
            assert_eq!(p.k % 2, 1);
            assert!(p.k >= last_k);
            last_k = p.k;
        }
    }

    #[test]
    fn errors_and_json() {
        assert!(matches!(select_params_str("-1/3"), Err(ParamsError::Negative(_))));
        assert!(matches!(select_params_str("x"), Err(ParamsError::Parse(_))));
        assert_eq!(
            select_params_str("0").unwrap().to_json(),
            r#"{"rho":"0","m":2,"p":5,"q":7,"k":35}"#
        );
        assert_eq!(select_params_str("5/2").unwrap().to_json(), r#"{"rho":"5/2","m":6,"p":11,"q":17,"k":187}"#);
    }
}
