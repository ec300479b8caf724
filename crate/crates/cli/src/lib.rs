//! Command-line front end: codebook inspection, Monte Carlo sweeps, rate
//! tables and figure presets, all emitted as CSV.

pub mod args;
pub mod commands;
pub mod config_file;
pub mod output;

use thiserror::Error;

pub use args::{Cli, Command};
pub use commands::run;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag values or combinations.
    #[error("{0}")]
    Usage(String),
    /// Parameters rejected by the model.
    #[error(transparent)]
    Model(#[from] ofdm_snm::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit code: 2 for flag/validation errors, 3 for runtime
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
