//! Compile, witness and check over random equations with known solutions.

use std::collections::HashMap;

use htp_lz::formula::audit_sentence;
use htp_lz::mpoly::MPoly;
use htp_lz::params::ParamSet;
use htp_lz::reduction::{build_witness, check_witness, compile_htp, DiophantineInput};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 3] = ["n1", "n2", "n3"];

/// A random integer polynomial of total degree at most 3 in `vars`.
fn random_poly(rng: &mut ChaCha8Rng, vars: &[String]) -> MPoly {
    let mut p = MPoly::zero();
    for _ in 0..rng.gen_range(1..=5) {
        let mut t = MPoly::constant(rng.gen_range(-4i64..=4));
        for _ in 0..rng.gen_range(0..=3) {
            t = t.mul(&MPoly::var(&vars[rng.gen_range(0..vars.len())]));
        }
        p = p.add(&t);
    }
    p
}

fn random_case(rng: &mut ChaCha8Rng) -> (DiophantineInput, Vec<BigInt>) {
    loop {
        let vars: Vec<String> = NAMES[..rng.gen_range(1..=3)].iter().map(|s| s.to_string()).collect();
        let sol: Vec<BigInt> = vars.iter().map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect();
        let q = random_poly(rng, &vars);
        let at: HashMap<String, BigInt> = vars.iter().cloned().zip(sol.iter().cloned()).collect();
        let p = q.sub(&MPoly::constant(q.eval_int(&at).unwrap()));
        if p.is_zero() {
            continue;
        }
        if let Ok(input) = DiophantineInput::new(p, vars) {
            return (input, sol);
        }
    }
}

#[test]
fn random_equations_round_trip() {
    let params = ParamSet::rho_zero();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<_> = (0..100).map(|_| random_case(&mut rng)).collect();
    let chunk = cases.len().div_ceil(std::thread::available_parallelism().map_or(4, |n| n.get()));
    std::thread::scope(|s| {
        for part in cases.chunks(chunk) {
            let params = &params;
            s.spawn(move || {
                for (input, sol) in part {
                    assert_eq!(input.eval(sol).unwrap(), BigInt::from(0));
                    let f = compile_htp(input, params);
                    assert!(audit_sentence(&f).is_empty());
                    let w = build_witness(input, sol, params).unwrap();
                    assert_eq!(check_witness(&f, &w.assignment), Ok(true), "{:?} at {sol:?}", input.poly());
                }
            });
        }
    });
}

#[test]
fn non_solutions_have_no_witness() {
    let params = ParamSet::rho_zero();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (input, mut sol) = random_case(&mut rng);
        sol[0] += 1;
        if input.eval(&sol).unwrap() != BigInt::from(0) {
            assert!(build_witness(&input, &sol, &params).is_err());
        }
    }
}
