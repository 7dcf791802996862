//! Parameter selection from a growth bound rho.

use htp_lz::params::select_params_str;

fn main() {
    for rho in ["0", "1/2", "1", "3", "10"] {
        let p = select_params_str(rho).unwrap();
        println!("rho = {rho:>4}: m = {:>2}, p = {:>2}, q = {:>2}, k = {}", p.m, p.p, p.q, p.k);
    }
    println!("{}", select_params_str("0").unwrap().to_json());
}
