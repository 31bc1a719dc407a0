//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! `cargo test --test acceptance -- 3 9` runs only the listed criteria.

use std::process::ExitCode;

use oqsim::acceptance::run_suite;

fn main() -> ExitCode {
    let ids: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let results = run_suite(&ids, |r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
