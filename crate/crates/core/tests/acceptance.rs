//! Acceptance criteria A1–A10, one line per criterion.
//!
//! `QWM_CRITERIA=A1,A7` restricts the run.

use std::process::ExitCode;

use qwm_core::validation::{parse_criteria, run_suite, SuiteOptions};

fn main() -> ExitCode {
    let criteria = match std::env::var("QWM_CRITERIA") {
        Ok(list) => match parse_criteria(&list) {
            Ok(set) => Some(set),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };
    let options = SuiteOptions {
        criteria,
        ..Default::default()
    };
    println!("acceptance suite");
    let reports = match run_suite(&options, |r| println!("{r}")) {
        Ok(r) => r,
        Err(e) => {
            println!("aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
