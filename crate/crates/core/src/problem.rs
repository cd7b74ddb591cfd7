//! Problems of the form `min_{x in X} E[f(phi(x, xi))]`.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::domain::BoxDomain;
use crate::error::{check_len, Error, Result};
use crate::phi::PhiFamily;
use crate::rng;
use crate::sampler::XiSampler;
use crate::stats::{try_par_moments, try_par_moments_vec, Estimate};

/// A convex, differentiable outer function `f`.
///
/// The stream lets `f` be an expectation itself (for example a recourse
/// cost over random capacities); deterministic functions ignore it.
pub trait OuterFunction: Send + Sync {
    fn value(&self, y: &[f64], rng: &mut dyn RngCore) -> Result<f64>;
    fn gradient(&self, y: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>>;
}

/// `f(y) = sum_i w_i (y_i - c_i)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub center: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadratic {
    pub fn new(center: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_len(center.len(), weights.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Argument(
                "quadratic weights must be nonnegative".into(),
            ));
        }
        Ok(Self { center, weights })
    }

    /// `||y - c||^2`.
    pub fn centered(center: Vec<f64>) -> Self {
        let weights = vec![1.0; center.len()];
        Self { center, weights }
    }

    /// Bound on `||grad f||` over the box `[lo, hi]` of reachable `y`.
    pub fn lipschitz_on(&self, lo: &[f64], hi: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(&self.weights)
            .zip(lo.iter().zip(hi))
            .map(|((c, w), (a, b))| (2.0 * w * (a - c).abs().max((b - c).abs())).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl OuterFunction for Quadratic {
    fn value(&self, y: &[f64], _rng: &mut dyn RngCore) -> Result<f64> {
        check_len(self.center.len(), y.len())?;
        Ok(y.iter()
            .zip(&self.center)
            .zip(&self.weights)
            .map(|((y, c), w)| w * (y - c).powi(2))
            .sum())
    }

    fn gradient(&self, y: &[f64], _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        check_len(self.center.len(), y.len())?;
        Ok(y.iter()
            .zip(&self.center)
            .zip(&self.weights)
            .map(|((y, c), w)| 2.0 * w * (y - c))
            .collect())
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Deterministic outer function from closures.
#[derive(Clone)]
pub struct FnOuter {
    value: Arc<ValueFn>,
    grad: Arc<GradFn>,
}

impl FnOuter {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }
}

impl fmt::Debug for FnOuter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnOuter")
    }
}

impl OuterFunction for FnOuter {
    fn value(&self, y: &[f64], _rng: &mut dyn RngCore) -> Result<f64> {
        Ok((self.value)(y))
    }

    fn gradient(&self, y: &[f64], _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok((self.grad)(y))
    }
}

/// Stochastic program `min_{x in X} F(x) = E[f(phi(x, xi))]`.
#[derive(Clone)]
pub struct Problem {
    pub domain: BoxDomain,
    pub phi: PhiFamily,
    pub sampler: XiSampler,
    pub outer: Arc<dyn OuterFunction>,
    pub outer_lipschitz: f64,
    /// Declared lower bound on the diagonal of `grad g` over `X`.
    pub mu_g: Option<f64>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("domain", &self.domain)
            .field("phi", &self.phi)
            .field("sampler", &self.sampler)
            .field("outer_lipschitz", &self.outer_lipschitz)
            .field("mu_g", &self.mu_g)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        domain: BoxDomain,
        phi: PhiFamily,
        sampler: XiSampler,
        outer: Arc<dyn OuterFunction>,
        outer_lipschitz: f64,
    ) -> Result<Self> {
        check_len(domain.dim(), sampler.dim())?;
        if !(outer_lipschitz.is_finite() && outer_lipschitz > 0.0) {
            return Err(Error::Argument(format!(
                "outer lipschitz constant {outer_lipschitz} must be positive"
            )));
        }
        Ok(Self {
            domain,
            phi,
            sampler,
            outer,
            outer_lipschitz,
            mu_g: None,
        })
    }

    pub fn with_mu_g(mut self, mu_g: f64) -> Self {
        self.mu_g = Some(mu_g);
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// One draw of `f(phi(x, xi))`.
    pub fn objective_sample(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        let xi = self.sampler.sample(rng);
        let y = self.phi.eval(x, &xi)?;
        self.outer.value(&y, rng)
    }

    /// Monte-Carlo estimate of `F(x)`. Sample `j` uses stream `(seed, [j])`,
    /// so estimates at different points share random numbers.
    pub fn sample_objective(&self, x: &[f64], n: usize, seed: u64) -> Result<Estimate> {
        check_len(self.dim(), x.len())?;
        if n == 0 {
            return Err(Error::Argument("sample count must be positive".into()));
        }
        let m = try_par_moments(n, |j| {
            self.objective_sample(x, &mut rng::stream(seed, &[j as u64]))
        })?;
        Ok(m.estimate())
    }

    /// Objective samples for a fixed list of scenario indices; useful for paired comparisons.
    pub fn objective_samples(&self, x: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
        (0..n)
            .map(|j| self.objective_sample(x, &mut rng::stream(seed, &[j as u64])))
            .collect()
    }

    /// Checks the declared `mu_g` against Monte-Carlo estimates of `grad g` on a
    /// grid of `points` values per coordinate. Returns the smallest estimate seen.
    pub fn check_mu_g(&self, points: usize, n: usize, seed: u64) -> Result<MuCheck> {
        if points < 2 || n == 0 {
            return Err(Error::Argument(
                "need at least 2 grid points and 1 sample".into(),
            ));
        }
        let d = self.dim();
        let mut smallest = f64::INFINITY;
        for p in 0..points {
            let s = p as f64 / (points - 1) as f64;
            let x: Vec<f64> = self
                .domain
                .lower()
                .iter()
                .zip(self.domain.upper())
                .map(|(lo, hi)| lo + s * (hi - lo))
                .collect();
            let m = try_par_moments_vec(n, d, |j| {
                let xi = self
                    .sampler
                    .sample(&mut rng::stream(seed, &[p as u64, j as u64]));
                self.phi.grad(&x, &xi)
            })?;
            smallest = m.iter().map(|m| m.mean).fold(smallest, f64::min);
        }
        Ok(MuCheck {
            declared: self.mu_g,
            observed_min: smallest,
            violated: self.mu_g.is_some_and(|mu| smallest < mu),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuCheck {
    pub declared: Option<f64>,
    pub observed_min: f64,
    pub violated: bool,
}

/// Per-coordinate Monte-Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Monte-Carlo estimate of `g(x) = E[phi(x, xi)]` over `n` fresh samples.
pub fn estimate_g(problem: &Problem, x: &[f64], n: usize, seed: u64) -> Result<VecEstimate> {
    check_len(problem.dim(), x.len())?;
    if n == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let d = problem.dim();
    let m = try_par_moments_vec(n, d, |j| {
        let xi = problem.sampler.sample(&mut rng::stream(seed, &[j as u64]));
        problem.phi.eval(x, &xi)
    })?;
    Ok(VecEstimate {
        mean: m.iter().map(|m| m.mean).collect(),
        stderr: m.iter().map(|m| m.stderr()).collect(),
    })
}
