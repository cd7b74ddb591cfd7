//! Coordinate-wise independent samplers for `xi`.

use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};
use statrs::distribution::{ContinuousCDF, DiscreteCDF, Normal};

use crate::error::{Error, Result};

/// One coordinate's distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    Uniform {
        a: f64,
        b: f64,
    },
    /// Normal(mu, sigma) conditioned on `[0, inf)`.
    TruncatedNormal {
        mu: f64,
        sigma: f64,
    },
    Discrete {
        support: Vec<f64>,
        weights: Vec<f64>,
    },
    /// Count-valued demand with the given mean.
    Poisson {
        mean: f64,
    },
    Binomial {
        n: u64,
        p: f64,
    },
}

impl Dist {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Argument(m));
        match self {
            Dist::Uniform { a, b } if !(a.is_finite() && b.is_finite() && a <= b) => {
                bad(format!("uniform needs finite a <= b (got {a}, {b})"))
            }
            Dist::TruncatedNormal { mu, sigma }
                if !(mu.is_finite() && *sigma > 0.0 && sigma.is_finite()) =>
            {
                bad(format!(
                    "truncated normal needs finite mu and sigma > 0 (got {mu}, {sigma})"
                ))
            }
            Dist::Discrete { support, weights } => {
                if support.is_empty() || support.len() != weights.len() {
                    return bad("discrete needs equally long, nonempty support and weights".into());
                }
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
                    || weights.iter().sum::<f64>() <= 0.0
                {
                    return bad("discrete weights must be nonnegative with positive sum".into());
                }
                if support.iter().any(|s| !s.is_finite()) {
                    return bad("discrete support must be finite".into());
                }
                Ok(())
            }
            Dist::Poisson { mean } if !(mean.is_finite() && *mean >= 0.0) => bad(format!(
                "poisson mean must be finite and nonnegative (got {mean})"
            )),
            Dist::Binomial { p, .. } if !(0.0..=1.0).contains(p) => {
                bad(format!("binomial p must lie in [0, 1] (got {p})"))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Dist::Uniform { a, b } => {
                if a == b {
                    *a
                } else {
                    a + (b - a) * rng.random::<f64>()
                }
            }
            Dist::TruncatedNormal { mu, sigma } => loop {
                let z: f64 = StandardNormal.sample(rng);
                let v = mu + sigma * z;
                if v >= 0.0 {
                    break v;
                }
            },
            Dist::Discrete { support, weights } => {
                let total: f64 = weights.iter().sum();
                let mut target = rng.random::<f64>() * total;
                for (s, w) in support.iter().zip(weights) {
                    if target < *w {
                        return *s;
                    }
                    target -= w;
                }
                *support
                    .iter()
                    .zip(weights)
                    .rev()
                    .find(|(_, w)| **w > 0.0)
                    .unwrap()
                    .0
            }
            Dist::Poisson { mean } => poisson(*mean, rng),
            Dist::Binomial { n, p } => binomial(*n, *p, rng),
        }
    }

    /// `P(xi <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            Dist::Uniform { a, b } => {
                if t < *a {
                    0.0
                } else if t >= *b {
                    1.0
                } else {
                    (t - a) / (b - a)
                }
            }
            Dist::TruncatedNormal { mu, sigma } => {
                if t < 0.0 {
                    return 0.0;
                }
                let n = Normal::new(*mu, *sigma).expect("validated");
                let z0 = n.cdf(0.0);
                (n.cdf(t) - z0) / (1.0 - z0)
            }
            Dist::Discrete { support, weights } => {
                let total: f64 = weights.iter().sum();
                support
                    .iter()
                    .zip(weights)
                    .filter(|(s, _)| **s <= t)
                    .map(|(_, w)| w)
                    .sum::<f64>()
                    / total
            }
            Dist::Poisson { mean } => {
                if t < 0.0 {
                    0.0
                } else if *mean == 0.0 {
                    1.0
                } else {
                    statrs::distribution::Poisson::new(*mean)
                        .expect("validated")
                        .cdf(t.floor() as u64)
                }
            }
            Dist::Binomial { n, p } => {
                if t < 0.0 {
                    0.0
                } else {
                    statrs::distribution::Binomial::new(*p, *n)
                        .expect("validated")
                        .cdf(t.floor() as u64)
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Dist::Uniform { a, b } => 0.5 * (a + b),
            Dist::TruncatedNormal { mu, sigma } => {
                let alpha = -mu / sigma;
                let pdf = (-0.5 * alpha * alpha).exp() / (2.0 * std::f64::consts::PI).sqrt();
                let tail = 1.0 - Normal::standard().cdf(alpha);
                mu + sigma * pdf / tail
            }
            Dist::Discrete { support, weights } => {
                let total: f64 = weights.iter().sum();
                support.iter().zip(weights).map(|(s, w)| s * w).sum::<f64>() / total
            }
            Dist::Poisson { mean } => *mean,
            Dist::Binomial { n, p } => *n as f64 * p,
        }
    }

    /// Essential supremum (may be infinite).
    pub fn sup(&self) -> f64 {
        match self {
            Dist::Uniform { b, .. } => *b,
            Dist::Discrete { support, weights } => support
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(s, _)| *s)
                .fold(f64::NEG_INFINITY, f64::max),
            Dist::Binomial { n, p } => {
                if *p > 0.0 {
                    *n as f64
                } else {
                    0.0
                }
            }
            Dist::Poisson { mean } if *mean == 0.0 => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// Poisson draw that accepts a zero mean.
pub fn poisson<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng)
}

pub fn binomial<R: RngCore + ?Sized>(n: u64, p: f64, rng: &mut R) -> f64 {
    if n == 0 || p <= 0.0 {
        return 0.0;
    }
    Binomial::new(n, p.min(1.0))
        .expect("valid binomial")
        .sample(rng) as f64
}

/// Product distribution over `d` independent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct XiSampler {
    dists: Vec<Dist>,
}

impl XiSampler {
    pub fn new(dists: Vec<Dist>) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::Argument(
                "sampler needs at least one coordinate".into(),
            ));
        }
        for d in &dists {
            d.validate()?;
        }
        Ok(Self { dists })
    }

    pub fn iid(dim: usize, dist: Dist) -> Result<Self> {
        Self::new(vec![dist; dim])
    }

    pub fn dim(&self) -> usize {
        self.dists.len()
    }

    pub fn dists(&self) -> &[Dist] {
        &self.dists
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.dists.iter().map(|d| d.sample(rng)).collect()
    }

    pub fn sample_into<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (o, d) in out.iter_mut().zip(&self.dists) {
            *o = d.sample(rng);
        }
    }

    /// Per-coordinate CDF values `H_i(t_i)`.
    pub fn cdf(&self, t: &[f64]) -> Vec<f64> {
        self.dists.iter().zip(t).map(|(d, &v)| d.cdf(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn all() -> Vec<Dist> {
        vec![
            Dist::Uniform { a: 0.0, b: 1.0 },
            Dist::TruncatedNormal {
                mu: 1.0,
                sigma: 0.8,
            },
            Dist::Discrete {
                support: vec![0.2, 0.8, 1.5],
                weights: vec![1.0, 2.0, 1.0],
            },
            Dist::Poisson { mean: 3.5 },
            Dist::Binomial { n: 10, p: 0.3 },
        ]
    }

    #[test]
    fn seeded_sequences_repeat() {
        let s = XiSampler::new(all()).unwrap();
        let a: Vec<Vec<f64>> = {
            let mut r = stream(11, &[0]);
            (0..50).map(|_| s.sample(&mut r)).collect()
        };
        let b: Vec<Vec<f64>> = {
            let mut r = stream(11, &[0]);
            (0..50).map(|_| s.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sample_means_match() {
        let n = 200_000;
        for d in all() {
            let mut r = stream(5, &[1]);
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut r)).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (v / n as f64).sqrt();
            assert!(
                (m - d.mean()).abs() < 4.0 * se,
                "{d:?}: {m} vs {}",
                d.mean()
            );
            assert!(xs.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn empirical_cdf_matches() {
        let n = 100_000;
        for d in all() {
            let mut r = stream(8, &[2]);
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut r)).collect();
            for t in [0.1, 0.5, 1.0, 2.0, 3.0] {
                let emp = xs.iter().filter(|&&x| x <= t).count() as f64 / n as f64;
                let p = d.cdf(t);
                let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
                assert!(
                    (emp - p).abs() <= 4.0 * se + 1e-12,
                    "{d:?} at {t}: {emp} vs {p}"
                );
            }
        }
    }

    #[test]
    fn validation() {
        assert!(Dist::Uniform { a: 1.0, b: 0.0 }.validate().is_err());
        assert!(Dist::TruncatedNormal {
            mu: 0.0,
            sigma: 0.0
        }
        .validate()
        .is_err());
        assert!(Dist::Discrete {
            support: vec![1.0],
            weights: vec![]
        }
        .validate()
        .is_err());
        assert!(XiSampler::new(vec![]).is_err());
        assert_eq!(poisson(0.0, &mut stream(0, &[])), 0.0);
    }
}
