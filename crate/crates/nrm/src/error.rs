use hcopt_lp::{LpError, LpStatus};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NrmError {
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("class table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("recourse LP ended with status {0:?}")]
    Solver(LpStatus),
    #[error(transparent)]
    Core(#[from] hcopt_core::Error),
}

pub type Result<T> = std::result::Result<T, NrmError>;

impl From<NrmError> for hcopt_core::Error {
    fn from(e: NrmError) -> Self {
        match e {
            NrmError::Core(c) => c,
            other => hcopt_core::Error::Outer(other.to_string()),
        }
    }
}

/// Collects field-level problems so a validation error lists all of them at once.
#[derive(Debug, Default)]
pub(crate) struct Issues(Vec<String>);

impl Issues {
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(NrmError::Invalid(self.0))
        }
    }
}
