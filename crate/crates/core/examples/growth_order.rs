//! Growth order of the entire solutions x = cosh(P), y = sinh(P)/w.

use htp_lz::growth::{circle, estimate_order, pell_residual, SolutionSpec};
use htp_lz::polyring::RatPoly;

fn main() {
    for (n, h) in [(1, vec![1]), (0, vec![0, 1]), (2, vec![0, 0, 1]), (3, vec![])] {
        let spec = SolutionSpec::new(n, RatPoly::from_i64s(&h));
        let e = estimate_order(&spec, 10.0, 1e4, 12).unwrap();
        let res = pell_residual(&spec, &circle(3.0, 64)).unwrap();
        println!("{spec}: rho_hat = {:.3}, fit residual {:.1e}, Pell residual {res:.1e}", e.rho_hat, e.residual_fit);
    }
}
