//! Compiles an integer equation into an L_z sentence, builds the witness
//! for a known solution and checks it.

use htp_lz::formula::{audit_sentence, Element};
use htp_lz::params::ParamSet;
use htp_lz::reduction::{build_witness, check_witness, compile_htp, DiophantineInput};
use num_bigint::BigInt;

fn main() {
    let params = ParamSet::rho_zero();
    let input = DiophantineInput::parse("n1^2 + n2^2 = n3^2").unwrap();
    let f = compile_htp(&input, &params);
    println!(
        "sentence: {} atoms, {} bound variables, audit {}",
        f.atoms().len(),
        f.bound_vars().len(),
        if audit_sentence(&f).is_empty() { "clean" } else { "FAILED" }
    );

    let sol: Vec<BigInt> = [3, 4, 5].into_iter().map(BigInt::from).collect();
    let w = build_witness(&input, &sol, &params).unwrap();
    let top = w.assignment.values().filter_map(|e| e.as_poly()).map(|p| p.degree()).max();
    println!("witness: {} entries, largest degree {top:?}", w.assignment.len());
    println!("check: {:?}", check_witness(&f, &w.assignment));

    let mut bad = w.assignment.clone();
    let key = "_n2_g".to_string();
    if let Some(Element::Poly(p)) = bad.get(&key).cloned() {
        bad.insert(key.clone(), Element::Poly(&p + &htp_lz::polyring::RatPoly::one()));
        println!("after bumping {key}: {:?}", check_witness(&f, &bad));
    }

    let not = [1, 1, 1].map(BigInt::from);
    println!("(1, 1, 1): {}", build_witness(&input, &not, &params).unwrap_err());
}
