//! Runs the fifteen acceptance criteria and prints one line per criterion.
//!
//! `LLS_ACCEPTANCE_PROFILE` selects `smoke`, `desk` (default) or
//! `full-desk`; `LLS_ZEROS_FILE` points at a high-height zeros file.

use lls_core::acceptance::{all_passed, Suite, SuiteConfig};

fn main() {
    let config = match SuiteConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("acceptance: {e}");
            std::process::exit(2);
        }
    };
    println!("acceptance suite, profile {}", config.profile);
    let suite = Suite::new(config).expect("worker pool");
    let results = suite.run_all(|r| {
        println!("{}", r.line());
        if r.verdict == lls_core::acceptance::Verdict::Fail {
            for c in r.checks.iter().filter(|c| !c.pass) {
                println!("          failing: {c}");
            }
        }
    });
    let failed = results.iter().filter(|r| r.verdict == lls_core::acceptance::Verdict::Fail).count();
    println!("acceptance: {} criteria, {failed} failed", results.len());
    if !all_passed(&results) {
        std::process::exit(1);
    }
}
