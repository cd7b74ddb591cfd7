//! Config-driven experiment runner: `run`, `compare` and `oracle`.

pub mod compare;
pub mod config;
pub mod diag;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod output;
pub mod resolve;

pub use compare::run_compare;
pub use diag::ConfigError;
pub use error::RunError;
pub use experiment::run_experiment;
pub use oracle::run_oracle;
pub use output::output_dir;
pub use resolve::{load, resolve_str, Resolved};
