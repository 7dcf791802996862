//! Runs the quick verification suites and reports each.

use htp_lz::verify::{verify_all, Level};

fn main() {
    let report = verify_all(Level::Quick, None);
    for s in &report.suites {
        println!("{:<12} {}  {}", s.suite, if s.pass { "pass" } else { "FAIL" }, s.detail);
    }
}
