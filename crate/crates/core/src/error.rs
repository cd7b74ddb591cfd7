use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("singular point in coordinate {coord}: {reason}")]
    Singularity { coord: usize, reason: String },
    #[error("value {value} in coordinate {coord} lies outside [{lower}, {upper}]")]
    OutOfDomain {
        coord: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("empirical transformation is singular in coordinate {coord} (u is on the boundary of the image box)")]
    SingularTransform { coord: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate instance: {0}")]
    Instance(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error("outer function failed: {0}")]
    Outer(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}
