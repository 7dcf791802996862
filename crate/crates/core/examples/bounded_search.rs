//! Exhaustive search for small polynomial witnesses.

use htp_lz::formula::{format_assignment, parse};
use htp_lz::reduction::{bounded_search, SearchLimits};

fn main() {
    let limits = SearchLimits { max_degree: 2, max_height: 2, budget: 2_000_000 };
    for src in ["E x . x*x = z*z", "E y . y = 1 + 1", "E x . E y . x*y = z*z + z", "E x . x*x = z"] {
        let f = parse(src).unwrap();
        match bounded_search(&f, limits) {
            Ok(Some(a)) => println!("{src}\n{}", format_assignment(&a)),
            Ok(None) => println!("{src}\nnone found within bounds\n"),
            Err(e) => println!("{src}\n{e}\n"),
        }
    }
}
