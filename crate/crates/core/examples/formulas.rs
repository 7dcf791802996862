//! Parsing, printing and evaluating positive existential L_z sentences.

use htp_lz::formula::{eval_ground, parse, parse_assignment, print, Term};
use num_bigint::BigUint;

fn main() {
    let f = parse("E x . E y . x*x = z*z + (1+1)*z + 1 & y = x + z").unwrap();
    println!("parsed: {f}");
    println!("free: {:?}, atoms: {}", f.free_vars(), f.atoms().len());

    let a = parse_assignment("x = [1, 1]\ny = [1, 2]  # 2z + 1\n").unwrap();
    println!("x = z + 1, y = 2z + 1: {}", eval_ground(&f, &a).unwrap());
    let a = parse_assignment("x = [-1, -1]\ny = [-1, 0]\n").unwrap();
    println!("x = -z - 1, y = -1: {}", eval_ground(&f, &a).unwrap());
    let a = parse_assignment("x = [1, 1]\ny = [0]\n").unwrap();
    println!("x = z + 1, y = 0: {}", eval_ground(&f, &a).unwrap());

    // numerals are built from 1 and + in binary Horner form
    let million = Term::numeral(&BigUint::from(1_000_000u32));
    println!("1000000 expands to {} nodes and prints back as {million}", million.size());

    for bad in ["E x . x - 1 = 0", "forall x . x = x"] {
        println!("{bad:?}: {}", parse(bad).unwrap_err());
    }
    println!("round trip: {}", parse(&print(&f)).unwrap() == f);
}
