//! Error type with the process exit codes the tool commits to:
//! 2 for configuration problems, 3 for numeric-contract violations,
//! 4 for I/O failures.

use qlga::{LatticeError, LinalgError, PacketError, SpectralError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric contract violated: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Contract(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PacketError> for CliError {
    fn from(e: PacketError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotUnitary { .. }
            | LinalgError::NoConvergence { .. }
            | LinalgError::ResidualExceeded { .. } => CliError::Contract(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
