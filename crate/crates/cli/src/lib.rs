//! `covert-frontier`: reads problem files, runs the constructions and checks
//! of `covert-core`, and writes JSON reports, structure files and SVG drawings.

pub mod commands;
pub mod problem;
pub mod render;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use commands::Output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }
}

impl From<covert_core::Error> for CliError {
    fn from(e: covert_core::Error) -> Self {
        use covert_core::Error as E;
        match e {
            E::InvalidStructure(_) | E::SpaceMismatch(_) | E::MarginalMismatch { .. } | E::InvalidUtility(_) => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Classify,
    Check,
    Construct,
    Compare,
    Render,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Blackwell,
    Evidence,
}

#[derive(Debug, Parser)]
#[command(name = "covert-frontier", version, about = "Secret and plausibly deniable information structures")]
pub struct Args {
    pub command: Command,
    /// Problem file (JSON, or TOML by extension); `compare` takes two.
    #[arg(long = "input", short = 'i')]
    pub inputs: Vec<PathBuf>,
    /// check: secrecy | pd | spd. construct: pd-greatest | direction-ordered |
    /// theorem4 | binary-greatest | spd-lift | secrecy-lift.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum, default_value = "blackwell")]
    pub mode: Mode,
    /// Sampled utilities per direction for `compare --mode evidence`.
    #[arg(long, default_value_t = covert_core::dominance::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rounds for `simulate`.
    #[arg(long, default_value_t = 100_000)]
    pub rounds: usize,
    /// Output file: the constructed structure, or the SVG.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the elapsed time out of the report.
    #[arg(long)]
    pub no_timing: bool,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => commands::execute(&args),
        Err(e) => {
            if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: e.to_string() }
            } else {
                Output { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() }
            }
        }
    }
}
