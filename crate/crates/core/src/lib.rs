//! Stochastic gradient methods for `min_{x in X} E[f(phi(x, xi))]` when the
//! problem is convex after the change of variables `u = E[phi(x, xi)]`.

pub mod domain;
pub mod error;
pub mod estimators;
pub mod optimizers;
pub mod oracles;
pub mod phi;
pub mod problem;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod transform;

pub use domain::BoxDomain;
pub use error::{Error, Result};
pub use phi::{phi_eval, phi_grad, PhiFamily, PhiKind};
pub use problem::{estimate_g, FnOuter, OuterFunction, Problem, Quadratic};
pub use sampler::{Dist, XiSampler};
pub use stats::{Estimate, Moments};
pub use transform::{empirical_g, empirical_g_inverse, TransformEstimate};

/// Euclidean projection onto `domain`.
pub fn project_box(domain: &BoxDomain, x: &[f64]) -> Result<Vec<f64>> {
    domain.project(x)
}
