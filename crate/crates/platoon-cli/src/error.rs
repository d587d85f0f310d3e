//! CLI error taxonomy mapped onto process exit codes:
//! 0 ok, 1 output I/O, 2 configuration, 3 numeric abort, 4 eigensolver
//! failure.

use std::fmt;

use platoon_core::metrics::MetricsError;
use platoon_core::sim::SimError;
use platoon_core::stability::EigenError;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable config, schema violation, invalid flag combination.
    Config(String),
    /// Failed to write an output file.
    Io(String),
    /// The integration aborted on a non-finite state.
    Numeric(String),
    /// The eigensolver did not converge or failed its residual bound.
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Solver(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric abort: {msg}"),
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonFinite { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Config(e.to_string())
    }
}
