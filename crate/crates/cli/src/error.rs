use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or malformed arguments; exit code 2.
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] totnet::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    /// Input files that parse but cannot be used; exit code 3.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
