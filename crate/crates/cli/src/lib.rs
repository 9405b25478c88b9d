//! Command-line front end: JSON experiment configs in, CSV/JSON reports out.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

pub use args::{Cli, Command, GlobalArgs, TentOp};
pub use config::{Action, ExperimentConfig, HoleConfig, SystemConfig};

/// Failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or config (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A bounded search gave up (exit 3).
    #[error("{0}")]
    Search(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Search(_) => 3,
        }
    }
}

/// Result of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    /// A well-formed question answered "no" (exit 1).
    Negative,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 1,
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match commands::dispatch(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("odesc: {e}");
            e.exit_code()
        }
    }
}
