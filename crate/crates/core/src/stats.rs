//! Running moments, deterministic parallel Monte-Carlo reductions and paired tests.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and sum of squared deviations, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / n as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / n as f64;
        Moments { count: n, mean, m2 }
    }

    pub fn from_slice(xs: &[f64]) -> Moments {
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        m
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            stderr: self.stderr(),
            n: self.count,
        }
    }
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

const CHUNK: usize = 2048;

/// Reduces `f(0..n)` into moments. Chunks are fixed and merged left to right,
/// so the result does not depend on the thread count.
pub fn par_moments<F>(n: usize, f: F) -> Moments
where
    F: Fn(usize) -> f64 + Sync,
{
    try_par_moments(n, |j| Ok::<_, std::convert::Infallible>(f(j))).unwrap_or_else(|e| match e {})
}

/// Fallible [`par_moments`]; the error of the lowest failing chunk wins.
pub fn try_par_moments<F, E>(n: usize, f: F) -> Result<Moments, E>
where
    F: Fn(usize) -> Result<f64, E> + Sync,
    E: Send,
{
    let chunks: Vec<Result<Moments, E>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                m.push(f(j)?);
            }
            Ok(m)
        })
        .collect();
    chunks
        .into_iter()
        .try_fold(Moments::default(), |acc, m| Ok(acc.merge(m?)))
}

/// Vector-valued [`try_par_moments`] for samples of length `dim`.
pub fn try_par_moments_vec<F, E>(n: usize, dim: usize, f: F) -> Result<Vec<Moments>, E>
where
    F: Fn(usize) -> Result<Vec<f64>, E> + Sync,
    E: Send,
{
    let chunks: Vec<Result<Vec<Moments>, E>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = vec![Moments::default(); dim];
            for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                for (mi, v) in m.iter_mut().zip(f(j)?) {
                    mi.push(v);
                }
            }
            Ok(m)
        })
        .collect();
    chunks
        .into_iter()
        .try_fold(vec![Moments::default(); dim], |acc, m| {
            Ok(acc.into_iter().zip(m?).map(|(a, b)| a.merge(b)).collect())
        })
}

/// Two-sided paired t-test on `a - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub mean_diff: f64,
    pub stderr: f64,
    pub t: f64,
    pub p_value: f64,
}

impl PairedTest {
    pub fn significant(&self, level: f64) -> bool {
        self.p_value < 1.0 - level
    }
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> PairedTest {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = Moments::from_slice(&diffs);
    let se = m.stderr();
    if m.count < 2 || se == 0.0 || !se.is_finite() {
        return PairedTest {
            mean_diff: m.mean,
            stderr: se,
            t: 0.0,
            p_value: 1.0,
        };
    }
    let t = m.mean / se;
    let dist = StudentsT::new(0.0, 1.0, (m.count - 1) as f64).expect("positive dof");
    let p_value = 2.0 * (1.0 - dist.cdf(t.abs()));
    PairedTest {
        mean_diff: m.mean,
        stderr: se,
        t,
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..10_000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let seq = Moments::from_slice(&xs);
        let par = par_moments(xs.len(), |j| xs[j]);
        assert_eq!(seq.count, par.count);
        assert!((seq.mean - par.mean).abs() < 1e-12);
        assert!((seq.variance() - par.variance()).abs() < 1e-9);
    }

    #[test]
    fn reduction_is_repeatable() {
        let a = par_moments(100_000, |j| (j as f64).sin());
        let b = par_moments(100_000, |j| (j as f64).sin());
        assert_eq!(a, b);
    }

    #[test]
    fn paired_identical_is_not_significant() {
        let a = [1.0, 2.0, 3.0];
        let t = paired_t_test(&a, &a);
        assert_eq!(t.mean_diff, 0.0);
        assert!(!t.significant(0.95));
    }

    #[test]
    fn paired_shift_is_significant() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64).cos()).collect();
        let b: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, x)| x - 1.0 + 0.01 * (i % 3) as f64)
            .collect();
        assert!(paired_t_test(&a, &b).significant(0.95));
    }
}
