use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qwm_cli::{run_file, selftest, CliError};
use qwm_core::validation::parse_criteria;

#[derive(Parser)]
#[command(name = "qwm", version, about = "Two-tone wave mixing on a single driven atom")]
struct Cli {
    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).  Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Reserved.  The pipeline is deterministic and does not draw random numbers.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        #[arg(value_name = "CONFIG")]
        config: PathBuf,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Comma-separated criteria, e.g. A1,A7.
        #[arg(long, value_name = "LIST")]
        criteria: Option<String>,
        #[arg(long, hide = true)]
        corrupt_bessel_table: bool,
    },
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config("--threads", e))?;
    }
    match cli.command {
        Command::Run { config } => {
            let result = run_file(&config, cli.out, cli.seed)?;
            for f in &result.files {
                println!("{}", f.display());
            }
            Ok(true)
        }
        Command::Selftest {
            criteria,
            corrupt_bessel_table,
        } => {
            let criteria = criteria
                .as_deref()
                .map(parse_criteria)
                .transpose()
                .map_err(|e| CliError::config("--criteria", e))?;
            selftest(criteria, corrupt_bessel_table, cli.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
