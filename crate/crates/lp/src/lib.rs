//! Dense two-phase revised simplex with shadow prices and optimality certificates.

mod certificate;
mod model;
mod simplex;

pub use certificate::{certificate, Certificate};
pub use model::{Constraint, LpError, LpProblem, LpSolution, LpStatus, RowKind, Sense};
pub use simplex::{solve_lp, solve_lp_with, SolverOptions};
