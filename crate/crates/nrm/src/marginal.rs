//! Nonnegative truncated-Gaussian marginals and a Gaussian copula for correlated pairs.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// `Normal(mu, sigma)` conditioned on `[0, inf)`. `sigma = 0` is a point mass at `max(mu, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub mu: f64,
    pub sigma: f64,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

impl Marginal {
    pub fn new(mu: f64, sigma: f64) -> Self {
        Self { mu, sigma }
    }

    /// Underlying mean `mu` with standard deviation `cv * mu`.
    pub fn with_cv(mu: f64, cv: f64) -> Self {
        Self { mu, sigma: cv * mu }
    }

    pub fn point(v: f64) -> Self {
        Self { mu: v, sigma: 0.0 }
    }

    pub fn is_valid(&self) -> bool {
        self.mu.is_finite()
            && self.sigma.is_finite()
            && self.sigma >= 0.0
            && (self.sigma > 0.0 || self.mu >= 0.0)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if self.sigma == 0.0 {
            return self.mu.max(0.0);
        }
        let n = std_normal();
        let lo = n.cdf(-self.mu / self.sigma);
        let q = (lo + u * (1.0 - lo)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        (self.mu + self.sigma * n.inverse_cdf(q)).max(0.0)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    pub fn mean(&self) -> f64 {
        if self.sigma == 0.0 {
            return self.mu.max(0.0);
        }
        let n = std_normal();
        let a = -self.mu / self.sigma;
        self.mu + self.sigma * n.pdf(a) / (1.0 - n.cdf(a))
    }
}

/// Draws `(u1, u2)` uniforms whose normal scores have correlation `rho`.
pub fn copula_pair<R: RngCore + ?Sized>(rho: f64, rng: &mut R) -> (f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let e: f64 = rng.sample(StandardNormal);
    let z2 = rho * z1 + (1.0 - rho * rho).max(0.0).sqrt() * e;
    let n = std_normal();
    (n.cdf(z1), n.cdf(z2))
}

/// A correlated pair drawn through [`copula_pair`].
pub fn correlated<R: RngCore + ?Sized>(
    a: &Marginal,
    b: &Marginal,
    rho: f64,
    rng: &mut R,
) -> (f64, f64) {
    let (u, v) = copula_pair(rho, rng);
    (a.quantile(u), b.quantile(v))
}
