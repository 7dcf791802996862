//! The Chebyshev solutions of the polynomial Pell equation and their group law.

use htp_lz::pell::{check_denef_properties, gen, group_add, group_pow, recognize};

fn main() {
    for n in 0..=4 {
        let p = gen(n);
        println!("n = {n}: x = {}, y = {}", p.x(), p.y());
    }

    let sum = group_add(&gen(3), &gen(-5));
    let idx = recognize(&sum).expect("in family");
    println!("gen(3) + gen(-5) is gen({}) with sign {}", idx.n, idx.epsilon);

    let cube = group_pow(&gen(2).negate(), 3);
    let idx = recognize(&cube).expect("in family");
    println!("(-x_2, -y_2) cubed: n = {}, eps = {}", idx.n, idx.epsilon);

    let report = check_denef_properties(40);
    println!("degree, value and divisibility checks up to 40: {}", if report.pass { "pass" } else { "FAIL" });
}
