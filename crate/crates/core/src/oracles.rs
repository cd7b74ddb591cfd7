//! Brute-force and closed-form references for calibrating estimators and optimizers.

use rand::RngCore;
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::domain::BoxDomain;
use crate::error::{check_len, Error, Result};
use crate::problem::Problem;
use crate::rng;
use crate::sampler::Dist;
use crate::stats::try_par_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    GridSearch,
    ClosedForm,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub stderr: f64,
    pub argmin: Option<Vec<f64>>,
    pub method: OracleMethod,
    pub resolution: Option<f64>,
}

/// Central (or, next to the boundary, one-sided) finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDiff {
    pub grad: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Coordinates that fell back to a forward or backward difference.
    pub one_sided: Vec<bool>,
}

/// Finite differences of `E[sample(x, rng)]`. Scenario `j` uses stream
/// `(seed, [j])` at both evaluation points, so the two means share random numbers.
pub fn finite_diff_grad<F>(
    sample: F,
    domain: &BoxDomain,
    x: &[f64],
    h: f64,
    n_mc: usize,
    seed: u64,
) -> Result<FiniteDiff>
where
    F: Fn(&[f64], &mut dyn RngCore) -> Result<f64> + Sync,
{
    check_len(domain.dim(), x.len())?;
    if !(h > 0.0) || n_mc == 0 {
        return Err(Error::Argument(
            "finite differences need h > 0 and n_mc >= 1".into(),
        ));
    }
    let mut out = FiniteDiff {
        grad: Vec::new(),
        stderr: Vec::new(),
        one_sided: Vec::new(),
    };
    for i in 0..x.len() {
        let (lo, hi) = (domain.lower()[i], domain.upper()[i]);
        let up = x[i] + h <= hi;
        let down = x[i] - h >= lo;
        let (a, b, width) = match (up, down) {
            (true, true) => (x[i] + h, x[i] - h, 2.0 * h),
            (true, false) => (x[i] + h, x[i], h),
            (false, true) => (x[i], x[i] - h, h),
            (false, false) => {
                return Err(Error::Argument(format!(
                    "coordinate {i}: step {h} does not fit inside [{lo}, {hi}] around {}",
                    x[i]
                )))
            }
        };
        let m = try_par_moments(n_mc, |j| {
            let mut xa = x.to_vec();
            xa[i] = a;
            let mut xb = x.to_vec();
            xb[i] = b;
            let fa = sample(&xa, &mut rng::stream(seed, &[j as u64]))?;
            let fb = sample(&xb, &mut rng::stream(seed, &[j as u64]))?;
            Ok((fa - fb) / width)
        })?;
        out.grad.push(m.mean);
        out.stderr.push(m.stderr());
        out.one_sided.push(!(up && down));
    }
    Ok(out)
}

/// Finite differences of the problem's objective.
pub fn finite_diff_grad_problem(
    problem: &Problem,
    x: &[f64],
    h: f64,
    n_mc: usize,
    seed: u64,
) -> Result<FiniteDiff> {
    finite_diff_grad(
        |p, r| problem.objective_sample(p, r),
        &problem.domain,
        x,
        h,
        n_mc,
        seed,
    )
}

/// Evaluates every candidate and returns the smallest mean; ties keep the earliest.
pub fn enumerate_min<F>(
    candidates: &[Vec<f64>],
    eval: F,
    method: OracleMethod,
    resolution: Option<f64>,
) -> Result<OracleResult>
where
    F: Fn(&[f64]) -> Result<(f64, f64)> + Sync,
{
    if candidates.is_empty() {
        return Err(Error::Argument("no candidates to enumerate".into()));
    }
    let values = candidates
        .par_iter()
        .map(|c| eval(c))
        .collect::<Result<Vec<_>>>()?;
    let (best, &(value, stderr)) = values
        .iter()
        .enumerate()
        .fold(
            None,
            |acc: Option<(usize, &(f64, f64))>, (i, v)| match acc {
                Some((_, b)) if b.0 <= v.0 => acc,
                _ => Some((i, v)),
            },
        )
        .expect("nonempty");
    Ok(OracleResult {
        value,
        stderr,
        argmin: Some(candidates[best].clone()),
        method,
        resolution,
    })
}

const GRID_MAX_DIM: usize = 3;
const GRID_MAX_POINTS: usize = 2_000_000;

/// Points `lower_i + k * step` inside the box, as a cartesian product.
pub fn grid_points(domain: &BoxDomain, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0) {
        return Err(Error::Argument("grid step must be positive".into()));
    }
    let axes: Vec<Vec<f64>> = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(lo, hi)| {
            let m = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=m).map(|k| lo + k as f64 * step).collect()
        })
        .collect();
    let total = axes
        .iter()
        .map(Vec::len)
        .try_fold(1usize, |a, n| a.checked_mul(n));
    if total.is_none_or(|t| t > GRID_MAX_POINTS) {
        return Err(Error::CostGuard(format!(
            "grid would exceed {GRID_MAX_POINTS} points"
        )));
    }
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Exhaustive Monte-Carlo search over a grid, with common random numbers across points.
pub fn grid_global_min(
    problem: &Problem,
    grid_step: f64,
    n_mc: usize,
    seed: u64,
) -> Result<OracleResult> {
    if problem.dim() > GRID_MAX_DIM {
        return Err(Error::CostGuard(format!(
            "grid search is limited to {GRID_MAX_DIM} dimensions (got {})",
            problem.dim()
        )));
    }
    let points = grid_points(&problem.domain, grid_step)?;
    enumerate_min(
        &points,
        |x| {
            let e = problem.sample_objective(x, n_mc, seed)?;
            Ok((e.mean, e.stderr))
        },
        OracleMethod::GridSearch,
        Some(grid_step),
    )
}

/// `g(x) = E[x ∧ xi]` and its right derivative `1 - H(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormG {
    pub value: f64,
    pub derivative: f64,
}

pub fn closed_form_g(dist: &Dist, x: f64) -> Result<ClosedFormG> {
    let value = match dist {
        Dist::Uniform { a, b } => {
            if x <= *a {
                x
            } else if x >= *b {
                0.5 * (a + b)
            } else {
                (0.5 * (x * x - a * a) + x * (b - x)) / (b - a)
            }
        }
        Dist::TruncatedNormal { mu, sigma } => {
            if x <= 0.0 {
                x
            } else {
                let n = Normal::standard();
                let alpha = -mu / sigma;
                let beta = (x - mu) / sigma;
                let z = 1.0 - n.cdf(alpha);
                let partial =
                    mu * (n.cdf(beta) - n.cdf(alpha)) + sigma * (n.pdf(alpha) - n.pdf(beta));
                partial / z + x * (1.0 - n.cdf(beta)) / z
            }
        }
        Dist::Discrete { support, weights } => {
            let total: f64 = weights.iter().sum();
            support
                .iter()
                .zip(weights)
                .map(|(s, w)| w * x.min(*s))
                .sum::<f64>()
                / total
        }
        other => {
            return Err(Error::Unsupported(format!("no closed form for {other:?}")));
        }
    };
    Ok(ClosedFormG {
        value,
        derivative: 1.0 - dist.cdf(x),
    })
}
