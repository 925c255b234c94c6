//! Batch runner behind the `sphere-sapt` binary. Every check is one
//! subcommand that writes `<out>/<command>.csv` and `<out>/<command>.json`.

pub mod args;
mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub use args::{Cli, Command};
pub use report::{Check, Outcome, Summary, Written};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] sphere_sapt::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sphere_sapt::Error as E;
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Core(
                E::InvalidArgument(_)
                | E::InsufficientGrid { .. }
                | E::Degenerate { .. }
                | E::GapTooSmall { .. }
                | E::GaugeSingular(_)
                | E::AmbiguousClusters { .. }
                | E::OutsideLowerRange { .. }
                | E::UnsupportedOrder(_),
            ) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        }
    }
}

/// A finished run.
#[derive(Debug)]
pub struct Run {
    pub command: &'static str,
    pub outcome: Outcome,
    pub written: Written,
}

/// Parses `args` (program name first), runs the subcommand and writes its
/// outputs.
pub fn execute(args: Vec<OsString>) -> Result<Run, CliError> {
    let args = config::merge_config(args)?;
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let (outcome, config) = commands::dispatch(&cli)?;
    let wall = start.elapsed().as_secs_f64();
    let command = cli.command.name();
    let summary = Summary {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        seed: cli.common.seed,
        wall_time_s: wall,
        passed: outcome.passed(),
        checks: &outcome.checks,
        results: &outcome.results,
    };
    let written = report::write_outputs(&cli.common.out, command, &outcome.table, &summary)?;
    Ok(Run {
        command,
        outcome,
        written,
    })
}

/// Runs the CLI and returns the process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    // help and version go through clap's own printing
    if let Ok(merged) = config::merge_config(args.clone()) {
        if let Err(e) = Cli::try_parse_from(merged) {
            if !e.use_stderr() {
                let _ = e.print();
                return EXIT_OK;
            }
        }
    }
    match execute(args) {
        Ok(run) => {
            for c in &run.outcome.checks {
                println!(
                    "{} {} = {:e} (target {})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.target
                );
            }
            println!("wrote {} and {}", run.written.csv.display(), run.written.json.display());
            if run.outcome.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("sphere-sapt: {e}");
            e.exit_code()
        }
    }
}
