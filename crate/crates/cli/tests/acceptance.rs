//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 4 and 9 are known to fail (see the README); they are reported
//! but do not fail the run. Any other failure, or an error, exits non-zero.
//! `ACCEPTANCE_ONLY=3,5` restricts the run.

use std::process::ExitCode;

use rydpump::Execution;
use rydpump_cli::checks::{run_criterion, CRITERIA};

const KNOWN_FAILURES: [u8; 2] = [4, 9];

fn main() -> ExitCode {
    let only: Option<Vec<u8>> = std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut unexpected = Vec::new();
    for id in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        match run_criterion(id, Execution::Auto) {
            Ok(outcome) => {
                println!("{outcome}");
                if !outcome.pass && !KNOWN_FAILURES.contains(&id) {
                    unexpected.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id} FAIL: error: {e}");
                unexpected.push(id);
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
