//! Command-line front end over scenario files.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification disagreement.

mod commands;
mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{cmd_index, cmd_mult, cmd_scan, cmd_verify, contours, Output, Status};
pub use scenario::{Model, Scan, Scenario, Task, DEFAULT_SCENARIO_NODES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "gindex", version, about = "Generalized index and multiplicity checks for scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized index per contour, as CSV
    Index(CommonArgs),
    /// Itemized identity and index-formula verdicts
    Verify(CommonArgs),
    /// Local index over a grid of probe circles, as CSV
    Scan(CommonArgs),
    /// Algebraic multiplicities per contour, as CSV
    Mult(CommonArgs),
}

#[derive(clap::Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the node count of every contour
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(command: &Command) -> Result<(Output, Option<PathBuf>), CliError> {
    let (Command::Index(a) | Command::Verify(a) | Command::Scan(a) | Command::Mult(a)) = command;
    let mut s = Scenario::from_path(&a.scenario)?;
    if let Some(n) = a.nodes {
        s.set_nodes(n)?;
    }
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    let out = match command {
        Command::Index(_) => cmd_index(&s)?,
        Command::Verify(_) => cmd_verify(&s)?,
        Command::Scan(_) => cmd_scan(&s)?,
        Command::Mult(_) => cmd_mult(&s)?,
    };
    Ok((out, a.out.clone()))
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = execute(&cli.command).and_then(|(out, path)| {
        emit(&out.text, path)?;
        Ok(out.status)
    });
    match result {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::NumericalFailure) => EXIT_NUMERICAL,
        Ok(Status::Disagreement) => {
            eprintln!("verification disagreement, see report");
            EXIT_DISAGREEMENT
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
