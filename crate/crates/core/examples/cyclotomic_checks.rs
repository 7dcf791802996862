//! Exact arithmetic in Q(zeta_k): cosines of rational angles, Galois kernels
//! and the rationality nullspace.

use htp_lz::cyclotomic::{
    cos_elem, cyclotomic_poly, eval_poly_at, galois_kernel, is_rational, rationality_nullspace, vandermonde_rank,
};
use htp_lz::pell::gen;

fn main() {
    println!("Phi_12 = {}", cyclotomic_poly(12));

    // cos(2*pi/5) is irrational but 4*cos^2 + 2*cos - 1 vanishes
    let c = cos_elem(5, 1).unwrap();
    let (rational, _) = is_rational(&c);
    println!("cos(2pi/5) rational: {rational}");

    let y35 = gen(35).y().clone();
    let zeros = (1..35).filter(|&a| eval_poly_at(&y35, &cos_elem(35, a).unwrap()).is_zero()).count();
    println!("y_35 vanishes at {zeros} of the 34 nontrivial cosines cos(2*pi*a/35)");

    let kernel: Vec<u64> = galois_kernel(5, 7).unwrap().iter().map(|s| s.rep()).collect();
    println!("kernel of Gal(Q(zeta_35)) -> Gal(Q(zeta_7)): {kernel:?}");
    println!("Vandermonde rank at (q = 7, m = 2): {}", vandermonde_rank(7, 2).unwrap());

    let r = rationality_nullspace(35, 2).unwrap();
    println!(
        "degree <= 2 polynomials rational at every a/35: dimension {}, basis {:?}",
        r.dimension,
        r.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>()
    );
}
