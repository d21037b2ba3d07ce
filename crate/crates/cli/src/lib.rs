//! Scenario runner and self-test for the wave-mixing simulator.

pub mod config;
pub mod error;
pub mod run;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use qwm_core::validation::{run_suite, Criterion, SuiteOptions};

pub use config::ScenarioConfig;
pub use error::CliError;
pub use run::{run_scenario, RunResult};

/// Reads, resolves and runs a scenario file.
pub fn run_file(path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<RunResult, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let resolved = ScenarioConfig::from_toml(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        .resolve()?;
    for w in &resolved.warnings {
        eprintln!("warning: {w}");
    }
    run_scenario(resolved, out, seed)
}

/// Runs the acceptance suite, printing one line per criterion.  Returns
/// whether every selected criterion passed; with `out`, the report is also
/// written to `selftest.txt` there.
pub fn selftest(
    criteria: Option<BTreeSet<Criterion>>,
    corrupt_bessel_table: bool,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let options = SuiteOptions {
        criteria,
        corrupt_bessel_table,
    };
    let mut lines = Vec::new();
    let reports = run_suite(&options, |r| {
        println!("{r}");
        lines.push(r.to_string());
    })?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    let summary = format!("{} passed, {failed} failed", reports.len() - failed);
    println!("{summary}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        lines.push(summary);
        let path = dir.join("selftest.txt");
        fs::write(&path, lines.join("\n") + "\n").map_err(|e| CliError::io(&path, e))?;
    }
    Ok(failed == 0)
}
