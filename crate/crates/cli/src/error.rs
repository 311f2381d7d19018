use std::io;

use thiserror::Error;

use crate::spec::SpecError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}
