use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::diag::ConfigError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] hcopt_core::Error),
    #[error(transparent)]
    Nrm(#[from] hcopt_nrm::NrmError),
    /// At least one method or check failed; details are in the written files.
    #[error("{0}")]
    Partial(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}
