//! `nsriemann`: builds, audits and compares solutions of multi-dimensional
//! Riemann problems with a source term.

mod commands;
mod csvio;
mod error;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Common;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nsriemann", version, about = "Riemann problems with a source term")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Tolerance override for the Rankine-Hugoniot check and the self-test.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the constructed solution on the scenario grid.
    Solve,
    /// Audit a solution file against the scenario problem.
    Verify {
        /// Solution file; defaults to `solution.csv` in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compare viscous runs with the constructed solution.
    Compare,
    /// Audit the candidate solutions of the growing-source problem.
    Nonunique,
    /// Run quick built-in checks.
    Selftest,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Scenario("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Scenario(e.to_string()))?;
    }
    let common = Common {
        scenario: cli.scenario,
        out: cli.out,
        tol: cli.tol,
    };
    match cli.command {
        Command::Solve => commands::solve(&common),
        Command::Verify { input } => commands::verify(&common, input.as_deref()),
        Command::Compare => commands::compare(&common),
        Command::Nonunique => commands::nonunique(&common),
        Command::Selftest => commands::selftest(&common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
