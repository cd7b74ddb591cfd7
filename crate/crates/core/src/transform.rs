//! Empirical transformation `g_hat(x) = (1/n) sum_j phi(x, xi^j)` over a frozen sample set.

use crate::domain::BoxDomain;
use crate::error::{check_len, Error, Result};
use crate::phi::PhiFamily;
use crate::problem::Problem;
use crate::rng::{self, slot};

const BISECTION_MAX_ITERS: usize = 200;

/// Per-coordinate sorted samples with prefix sums, for `x ∧ xi` in `O(log n)`.
#[derive(Debug, Clone)]
struct SortedColumn {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl SortedColumn {
    fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        for v in &values {
            prefix.push(prefix.last().unwrap() + v);
        }
        Self {
            sorted: values,
            prefix,
        }
    }

    /// Number of samples `<= x`.
    fn rank(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    fn mean_min(&self, x: f64) -> f64 {
        let k = self.rank(x);
        let n = self.sorted.len();
        (self.prefix[k] + x * (n - k) as f64) / n as f64
    }

    fn frac_above(&self, x: f64) -> f64 {
        let n = self.sorted.len();
        (n - self.rank(x)) as f64 / n as f64
    }
}

#[derive(Debug, Clone)]
pub struct TransformEstimate {
    phi: PhiFamily,
    domain: BoxDomain,
    samples: Vec<Vec<f64>>,
    columns: Option<Vec<SortedColumn>>,
    image: BoxDomain,
}

impl TransformEstimate {
    /// Builds `g_hat` from samples given row-wise (`samples[j]` is `xi^j`).
    pub fn new(phi: PhiFamily, domain: BoxDomain, samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Argument("sample set must not be empty".into()));
        }
        for s in &samples {
            check_len(domain.dim(), s.len())?;
        }
        let columns = phi.is_trunc_min().then(|| {
            (0..domain.dim())
                .map(|i| SortedColumn::new(samples.iter().map(|s| s[i]).collect()))
                .collect()
        });
        let mut t = Self {
            phi,
            image: domain.clone(),
            domain,
            samples,
            columns,
        };
        let lo = t.g(t.domain.lower())?;
        let hi = t.g(t.domain.upper())?;
        t.image = BoxDomain::new(lo, hi)?;
        Ok(t)
    }

    /// Freezes `n` samples drawn from the problem's sampler.
    pub fn freeze(problem: &Problem, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("sample count must be positive".into()));
        }
        let samples = (0..n)
            .map(|j| {
                problem
                    .sampler
                    .sample(&mut rng::stream(seed, &[slot::FROZEN, j as u64]))
            })
            .collect();
        Self::new(problem.phi, problem.domain.clone(), samples)
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn phi(&self) -> &PhiFamily {
        &self.phi
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// The image box `[g_hat(lower), g_hat(upper)]`.
    pub fn image(&self) -> &BoxDomain {
        &self.image
    }

    pub fn g_coord(&self, i: usize, x: f64) -> Result<f64> {
        if let Some(cols) = &self.columns {
            return Ok(cols[i].mean_min(x));
        }
        let mut sum = 0.0;
        for s in &self.samples {
            sum += self.phi.value_1d(i, x, s[i])?;
        }
        Ok(sum / self.n() as f64)
    }

    pub fn g(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        x.iter()
            .enumerate()
            .map(|(i, &v)| self.g_coord(i, v))
            .collect()
    }

    /// Diagonal of `grad g_hat(x)`, the sample mean of `grad phi(x, xi^j)`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        if let Some(cols) = &self.columns {
            return Ok(x.iter().zip(cols).map(|(&v, c)| c.frac_above(v)).collect());
        }
        let mut acc = vec![0.0; self.dim()];
        for s in &self.samples {
            for (i, a) in acc.iter_mut().enumerate() {
                *a += self.phi.derivative_1d(i, x[i], s[i])?;
            }
        }
        Ok(acc.into_iter().map(|a| a / self.n() as f64).collect())
    }

    /// `inf { x in [lower_i, upper_i] : g_hat_i(x) >= u }` by bisection.
    pub fn inverse_coord(&self, i: usize, u: f64) -> Result<f64> {
        let (ulo, uhi) = (self.image.lower()[i], self.image.upper()[i]);
        if !(ulo..=uhi).contains(&u) {
            return Err(Error::OutOfDomain {
                coord: i,
                value: u,
                lower: ulo,
                upper: uhi,
            });
        }
        let mut lo = self.domain.lower()[i];
        let mut hi = self.domain.upper()[i];
        if u <= ulo {
            return Ok(lo);
        }
        for _ in 0..BISECTION_MAX_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g_coord(i, mid)? >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    pub fn inverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), u.len())?;
        u.iter()
            .enumerate()
            .map(|(i, &v)| self.inverse_coord(i, v))
            .collect()
    }

    /// `delta = min(delta0, min_i (U_hi - U_lo) / 2)`.
    pub fn radius(&self, delta0: f64) -> f64 {
        let half_width = self
            .image
            .lower()
            .iter()
            .zip(self.image.upper())
            .map(|(lo, hi)| 0.5 * (hi - lo))
            .fold(f64::INFINITY, f64::min);
        delta0.min(half_width)
    }

    /// The shrunken box `U_delta`, or an instance error when `delta <= 0`.
    pub fn shrunken_image(&self, delta0: f64) -> Result<(f64, BoxDomain)> {
        let delta = self.radius(delta0);
        if !(delta > 0.0) {
            return Err(Error::Instance(format!(
                "shrinking radius {delta} is not positive; the sample set does not separate the box bounds"
            )));
        }
        Ok((delta, self.image.shrink(delta)?))
    }
}

/// Exact empirical mean of `phi(x, xi^j)` over `samples`.
pub fn empirical_g(samples: &[Vec<f64>], phi: &PhiFamily, x: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Argument("sample set must not be empty".into()));
    }
    let mut acc = vec![0.0; x.len()];
    for s in samples {
        for (a, v) in acc.iter_mut().zip(phi.eval(x, s)?) {
            *a += v;
        }
    }
    Ok(acc.into_iter().map(|a| a / samples.len() as f64).collect())
}

/// Generalized inverse of the empirical transformation on `domain`.
pub fn empirical_g_inverse(
    samples: &[Vec<f64>],
    phi: &PhiFamily,
    domain: &BoxDomain,
    u: &[f64],
) -> Result<Vec<f64>> {
    TransformEstimate::new(*phi, domain.clone(), samples.to_vec())?.inverse(u)
}
