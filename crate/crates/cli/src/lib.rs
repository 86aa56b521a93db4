//! `misocache` command line: single points, grid sweeps, gap and CSIT
//! savings audits, and end-to-end simulation.
//!
//! Exit codes: 0 success, 1 a checked claim or a simulation failed,
//! 2 invalid usage.

mod commands;
pub mod grid;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{DeltaArgs, GapAuditArgs, PointArgs, SimulateArgs};
use grid::GridArgs;
use output::Format;

/// CSV header of `compute` and `sweep`.
pub const SWEEP_HEADER: [&str; 14] =
    ["K", "N", "M", "gamma", "Gamma", "alpha", "regime", "eta", "T", "dof", "T_lb", "argmax_s", "gap", "delta"];

#[derive(Debug, Parser)]
#[command(name = "misocache", version, about = "Coded caching with imperfect CSIT: analysis and simulation")]
pub struct Cli {
    /// Output format (default: text, or csv for `sweep`)
    #[arg(long, global = true, value_enum, env = "MISOCACHE_FORMAT")]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads for grid evaluation
    #[arg(long, global = true, env = "MISOCACHE_THREADS")]
    pub threads: Option<usize>,

    /// Seed for library generation and random requests
    #[arg(long, global = true, env = "MISOCACHE_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Delivery time, DoF, lower bound, gap and CSIT savings at one point
    Compute(PointArgs),
    /// Evaluate every point of a grid
    Sweep(GridArgs),
    /// Largest gap to the lower bound over a grid
    GapAudit(GapAuditArgs),
    /// Run the scheme bit by bit and check every user decodes
    Simulate(SimulateArgs),
    /// CSIT savings: closed form against a bisection oracle
    Delta(DeltaArgs),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<misocache::Error> for CliError {
    fn from(e: misocache::Error) -> Self {
        match e {
            misocache::Error::RateBudget { .. } | misocache::Error::MissingUnit { .. } => {
                CliError::Failed(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// A rendered document plus whether the command's check passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
    /// Printed to stderr.
    pub note: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, passed: true, note: None }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let work = || commands::dispatch(cli);
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(work),
        None => work(),
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = output::emit(cli.out.as_deref(), &outcome.body) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
