//! Stochastic gradient and inverse-Jacobian estimators.

use rand::{Rng, RngCore};

use crate::error::{check_len, Error, Result};
use crate::problem::Problem;
use crate::transform::TransformEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    Plain,
    Regularized,
    Mirror,
    SaaReform,
    CoordReform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub vector: Vec<f64>,
    pub kind: GradientKind,
    pub samples_used: u64,
}

/// Diagonal estimate of `[grad g(x)]^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseEstimate {
    pub diag: Vec<f64>,
    pub index_k: usize,
    pub samples_used: u64,
}

/// `grad phi(x, xi)^T grad f(phi(x, xi))` for a given `xi`.
pub fn plain_at(
    problem: &Problem,
    x: &[f64],
    xi: &[f64],
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    check_len(problem.dim(), x.len())?;
    let y = problem.phi.eval(x, xi)?;
    let dphi = problem.phi.grad(x, xi)?;
    let df = problem.outer.gradient(&y, rng)?;
    check_len(x.len(), df.len())?;
    Ok(dphi
        .iter()
        .zip(&df)
        .map(|(a, b)| if *a == 0.0 { 0.0 } else { a * b })
        .collect())
}

pub fn grad_estimate_plain(
    problem: &Problem,
    x: &[f64],
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    let xi = problem.sampler.sample(rng);
    Ok(GradientSample {
        vector: plain_at(problem, x, &xi, rng)?,
        kind: GradientKind::Plain,
        samples_used: 1,
    })
}

pub fn grad_estimate_regularized(
    problem: &Problem,
    x: &[f64],
    lambda: f64,
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    check_lambda(lambda)?;
    let mut g = grad_estimate_plain(problem, x, rng)?;
    add_scaled(&mut g.vector, lambda, x);
    g.kind = GradientKind::Regularized;
    Ok(g)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Argument(format!(
            "lambda {lambda} must be nonnegative"
        )));
    }
    Ok(())
}

fn add_scaled(v: &mut [f64], lambda: f64, x: &[f64]) {
    if lambda != 0.0 {
        v.iter_mut().zip(x).for_each(|(a, b)| *a += lambda * b);
    }
}

/// Neumann-series estimate with a prescribed truncation index `k`.
pub fn neumann_inverse_with_k(
    problem: &Problem,
    x: &[f64],
    big_k: usize,
    c: f64,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<InverseEstimate> {
    check_len(problem.dim(), x.len())?;
    if big_k == 0 {
        return Err(Error::Argument("K must be at least 1".into()));
    }
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::Argument(format!("c = {c} must exceed 1")));
    }
    let scale = c * problem.phi.lipschitz();
    let mut diag = vec![big_k as f64 / scale; x.len()];
    for _ in 0..k {
        let xi = problem.sampler.sample(rng);
        for (d, g) in diag.iter_mut().zip(problem.phi.grad(x, &xi)?) {
            *d *= 1.0 - g / scale;
        }
    }
    Ok(InverseEstimate {
        diag,
        index_k: k,
        samples_used: k as u64,
    })
}

/// Draws `k ~ U{0..K-1}` and returns `(K/(cL)) prod_{i<=k} (I - grad phi(x, xi^i)/(cL))`.
pub fn neumann_inverse(
    problem: &Problem,
    x: &[f64],
    big_k: usize,
    c: f64,
    rng: &mut dyn RngCore,
) -> Result<InverseEstimate> {
    if big_k == 0 {
        return Err(Error::Argument("K must be at least 1".into()));
    }
    let k = rng.random_range(0..big_k);
    neumann_inverse_with_k(problem, x, big_k, c, k, rng)
}

fn combine_mirror(
    a: &InverseEstimate,
    b: &InverseEstimate,
    g: GradientSample,
    lambda: f64,
    x: &[f64],
) -> GradientSample {
    let mut vector: Vec<f64> = a
        .diag
        .iter()
        .zip(&b.diag)
        .zip(&g.vector)
        .map(|((a, b), v)| (a * b) * v)
        .collect();
    add_scaled(&mut vector, lambda, x);
    GradientSample {
        vector,
        kind: GradientKind::Mirror,
        samples_used: a.samples_used + b.samples_used + g.samples_used,
    }
}

/// The three independent sources used by the mirror estimator.
pub struct MirrorStreams<'a> {
    pub inverse_a: &'a mut dyn RngCore,
    pub inverse_b: &'a mut dyn RngCore,
    pub gradient: &'a mut dyn RngCore,
}

/// `A B grad phi(x, xi)^T grad f(phi(x, xi)) + lambda x` with `A`, `B`
/// independent inverse estimates at `c = 2`.
pub fn grad_estimate_mirror_streams(
    problem: &Problem,
    x: &[f64],
    big_k: usize,
    lambda: f64,
    streams: MirrorStreams<'_>,
) -> Result<GradientSample> {
    check_lambda(lambda)?;
    let a = neumann_inverse(problem, x, big_k, 2.0, streams.inverse_a)?;
    let b = neumann_inverse(problem, x, big_k, 2.0, streams.inverse_b)?;
    let g = grad_estimate_plain(problem, x, streams.gradient)?;
    Ok(combine_mirror(&a, &b, g, lambda, x))
}

/// Mirror estimator drawing `A`, `B` and `xi` in turn from one stream.
pub fn grad_estimate_mirror(
    problem: &Problem,
    x: &[f64],
    big_k: usize,
    lambda: f64,
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    check_lambda(lambda)?;
    let a = neumann_inverse(problem, x, big_k, 2.0, rng)?;
    let b = neumann_inverse(problem, x, big_k, 2.0, rng)?;
    let g = grad_estimate_plain(problem, x, rng)?;
    Ok(combine_mirror(&a, &b, g, lambda, x))
}

/// Reformulated gradient with the frozen sample `xi^index`.
pub fn saa_reform_at(
    transform: &TransformEstimate,
    problem: &Problem,
    u: &[f64],
    index: usize,
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    let x = transform.inverse(u)?;
    saa_reform_at_x(transform, problem, &x, index, rng)
}

/// As [`saa_reform_at`] for an already inverted point `x = g_hat^{-1}(u)`.
pub fn saa_reform_at_x(
    transform: &TransformEstimate,
    problem: &Problem,
    x: &[f64],
    index: usize,
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    let dg = transform.grad(x)?;
    if let Some(coord) = dg.iter().position(|&v| v == 0.0) {
        return Err(Error::SingularTransform { coord });
    }
    let xi = transform
        .samples()
        .get(index)
        .ok_or_else(|| Error::Argument(format!("sample index {index} out of range")))?;
    let v = plain_at(problem, x, xi, rng)?;
    Ok(GradientSample {
        vector: v.iter().zip(&dg).map(|(v, d)| v / d).collect(),
        kind: GradientKind::SaaReform,
        samples_used: 1,
    })
}

/// `grad g_hat(x)^{-1} grad phi(x, xi')^T grad f(phi(x, xi'))` with `xi'` uniform over the frozen set.
pub fn grad_estimate_saa_reform(
    transform: &TransformEstimate,
    problem: &Problem,
    u: &[f64],
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    let index = rng.random_range(0..transform.n());
    saa_reform_at(transform, problem, u, index, rng)
}

/// `[grad f(y)]_i` where `y_i = x_i` and `y_k = x_k ∧ xi_k` for `k != i`.
pub fn coord_value(
    problem: &Problem,
    x: &[f64],
    i: usize,
    xi: &[f64],
    rng: &mut dyn RngCore,
) -> Result<f64> {
    check_len(x.len(), xi.len())?;
    let y: Vec<f64> = x
        .iter()
        .zip(xi)
        .enumerate()
        .map(|(k, (a, b))| if k == i { *a } else { a.min(*b) })
        .collect();
    Ok(problem.outer.gradient(&y, rng)?[i])
}

/// Frozen-sample indices `j` with `xi_i^j > x_i`.
pub fn coord_support(transform: &TransformEstimate, x: &[f64], i: usize) -> Vec<usize> {
    transform
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, s)| s[i] > x[i])
        .map(|(j, _)| j)
        .collect()
}

fn require_trunc_min(problem: &Problem) -> Result<()> {
    if !problem.phi.is_trunc_min() {
        return Err(Error::Unsupported(
            "the coordinate estimator is defined for the truncated-minimum family only".into(),
        ));
    }
    Ok(())
}

/// Coordinate estimator with explicit choices: coordinate `i` uses frozen sample `choices[i]`,
/// which must satisfy `xi_i > x_i`.
pub fn coord_reform_given(
    transform: &TransformEstimate,
    problem: &Problem,
    x: &[f64],
    choices: &[usize],
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    require_trunc_min(problem)?;
    check_len(x.len(), choices.len())?;
    let vector = choices
        .iter()
        .enumerate()
        .map(|(i, &j)| coord_value(problem, x, i, &transform.samples()[j], rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientSample {
        vector,
        kind: GradientKind::CoordReform,
        samples_used: x.len() as u64,
    })
}

/// Low-variance estimator of `grad G_hat(u)` for `x ∧ xi`: coordinate `i`
/// evaluates `grad f` with its own input untruncated and the others truncated by
/// a frozen sample drawn uniformly among those with `xi_i > x_i`.
pub fn grad_estimate_coord_reform(
    transform: &TransformEstimate,
    problem: &Problem,
    u: &[f64],
    rng: &mut dyn RngCore,
) -> Result<GradientSample> {
    require_trunc_min(problem)?;
    let x = transform.inverse(u)?;
    let mut choices = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let support = coord_support(transform, &x, i);
        if support.is_empty() {
            return Err(Error::SingularTransform { coord: i });
        }
        choices.push(support[rng.random_range(0..support.len())]);
    }
    coord_reform_given(transform, problem, &x, &choices, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::phi::{PhiFamily, PhiKind};
    use crate::problem::Quadratic;
    use crate::rng::stream;
    use crate::sampler::{Dist, XiSampler};
    use crate::stats::Moments;
    use std::sync::Arc;

    fn problem(dist: Dist, center: f64) -> Problem {
        Problem::new(
            BoxDomain::uniform(1, 0.0, 2.0).unwrap(),
            PhiFamily::trunc_min(),
            XiSampler::iid(1, dist).unwrap(),
            Arc::new(Quadratic::centered(vec![center])),
            4.0,
        )
        .unwrap()
    }

    fn point(v: f64) -> Dist {
        Dist::Discrete {
            support: vec![v],
            weights: vec![1.0],
        }
    }

    #[test]
    fn plain_examples() {
        let p = problem(point(0.7), 0.0);
        let mut r = stream(0, &[]);
        assert_eq!(
            grad_estimate_plain(&p, &[0.5], &mut r).unwrap().vector,
            vec![1.0]
        );
        let p = problem(point(0.3), 0.0);
        assert_eq!(
            grad_estimate_plain(&p, &[0.5], &mut r).unwrap().vector,
            vec![0.0]
        );
    }

    #[test]
    fn plain_mean_matches_gradient() {
        let p = problem(Dist::Uniform { a: 0.0, b: 1.0 }, 0.0);
        let mut r = stream(1, &[]);
        let mut m = Moments::default();
        for _ in 0..100_000 {
            m.push(grad_estimate_plain(&p, &[0.5], &mut r).unwrap().vector[0]);
        }
        assert!((m.mean - 0.5).abs() < 4.0 * m.stderr());
    }

    #[test]
    fn regularized_examples() {
        let p = problem(point(0.7), 0.0);
        let a = grad_estimate_regularized(&p, &[0.5], 0.0, &mut stream(2, &[])).unwrap();
        let b = grad_estimate_plain(&p, &[0.5], &mut stream(2, &[])).unwrap();
        assert_eq!(a.vector, b.vector);
        let c = grad_estimate_regularized(&p, &[0.5], 0.2, &mut stream(2, &[])).unwrap();
        assert!((c.vector[0] - 1.1).abs() < 1e-15);
        let p = problem(Dist::Uniform { a: 0.0, b: 1.0 }, 0.3);
        let d = grad_estimate_regularized(&p, &[1.0], 0.1, &mut stream(3, &[])).unwrap();
        assert_eq!(d.vector, vec![0.1]);
        assert!(grad_estimate_regularized(&p, &[1.0], -0.1, &mut stream(3, &[])).is_err());
    }

    #[test]
    fn neumann_k_zero_is_scaled_identity() {
        let p = problem(Dist::Uniform { a: 0.0, b: 1.0 }, 0.0);
        let e = neumann_inverse_with_k(&p, &[0.5], 10, 2.0, 0, &mut stream(4, &[])).unwrap();
        assert_eq!(e.diag, vec![5.0]);
        assert_eq!(e.samples_used, 0);
    }

    #[test]
    fn neumann_deterministic_mean() {
        let p = problem(point(1.5), 0.0);
        let mut r = stream(5, &[]);
        let mut m = Moments::default();
        let mut used = Moments::default();
        for _ in 0..200_000 {
            let e = neumann_inverse(&p, &[0.5], 10, 2.0, &mut r).unwrap();
            assert!(e.diag[0] >= 0.0 && e.diag[0] <= 5.0);
            assert_eq!(e.samples_used as usize, e.index_k);
            m.push(e.diag[0]);
            used.push(e.samples_used as f64);
        }
        assert!((m.mean - 0.9990234375).abs() < 4.0 * m.stderr());
        assert!((used.mean - 4.5).abs() < 4.0 * used.stderr());
    }

    #[test]
    fn mirror_k_one() {
        let p = problem(point(0.9), 0.0);
        let g = grad_estimate_mirror(&p, &[0.5], 1, 0.0, &mut stream(6, &[])).unwrap();
        assert_eq!(g.vector, vec![0.25]);
        assert_eq!(g.samples_used, 1);
        let g = grad_estimate_mirror(&p, &[0.5], 1, 0.4, &mut stream(6, &[])).unwrap();
        assert!((g.vector[0] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn mirror_zero_outer_gradient() {
        let mut r = stream(7, &[]);
        let flat = Problem::new(
            BoxDomain::uniform(1, 0.0, 2.0).unwrap(),
            PhiFamily::trunc_min(),
            XiSampler::iid(1, Dist::Uniform { a: 0.0, b: 1.0 }).unwrap(),
            Arc::new(crate::problem::FnOuter::new(
                |_| 1.0,
                |y| vec![0.0; y.len()],
            )),
            1.0,
        )
        .unwrap();
        for _ in 0..100 {
            let g = grad_estimate_mirror(&flat, &[0.5], 10, 0.0, &mut r).unwrap();
            assert_eq!(g.vector, vec![0.0]);
        }
    }

    fn frozen() -> (TransformEstimate, Problem) {
        let p = problem(Dist::Uniform { a: 0.0, b: 1.0 }, 0.0);
        let t = TransformEstimate::new(
            PhiFamily::trunc_min(),
            BoxDomain::uniform(1, 0.0, 1.0).unwrap(),
            vec![vec![0.2], vec![0.8]],
        )
        .unwrap();
        (t, p)
    }

    #[test]
    fn saa_reform_examples() {
        let (t, p) = frozen();
        let mut r = stream(8, &[]);
        let v = saa_reform_at(&t, &p, &[0.35], 1, &mut r).unwrap();
        assert!((v.vector[0] - 2.0).abs() < 1e-9);
        let v = saa_reform_at(&t, &p, &[0.35], 0, &mut r).unwrap();
        assert_eq!(v.vector, vec![0.0]);
        // L_f = 2 on [0, 1]; E v^2 <= n d L_f^2
        let mut m2 = 0.0;
        for j in 0..2 {
            m2 += saa_reform_at(&t, &p, &[0.35], j, &mut r).unwrap().vector[0].powi(2) / 2.0;
        }
        assert!(m2 <= 2.0 * 1.0 * 4.0);
    }

    #[test]
    fn saa_reform_singular_at_top() {
        let (t, p) = frozen();
        let err = saa_reform_at_x(&t, &p, &[0.9], 0, &mut stream(0, &[])).unwrap_err();
        assert_eq!(err, Error::SingularTransform { coord: 0 });
    }

    #[test]
    fn coord_examples() {
        let p = problem(Dist::Uniform { a: 0.0, b: 1.0 }, 0.0);
        assert!(
            (coord_value(&p, &[0.3], 0, &[0.1], &mut stream(0, &[])).unwrap() - 0.6).abs() < 1e-15
        );
        let p2 = Problem::new(
            BoxDomain::uniform(2, 0.0, 1.0).unwrap(),
            PhiFamily::trunc_min(),
            XiSampler::iid(2, Dist::Uniform { a: 0.0, b: 1.0 }).unwrap(),
            Arc::new(Quadratic::centered(vec![0.0, 0.0])),
            3.0,
        )
        .unwrap();
        let v = coord_value(&p2, &[0.3, 0.4], 0, &[0.05, 0.1], &mut stream(0, &[])).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
        let other = Problem::new(
            BoxDomain::uniform(1, 0.0, 1.0).unwrap(),
            PhiFamily::new(PhiKind::Product, 1.0).unwrap(),
            XiSampler::iid(1, Dist::Uniform { a: 0.0, b: 1.0 }).unwrap(),
            Arc::new(Quadratic::centered(vec![0.0])),
            2.0,
        )
        .unwrap();
        let (t, _) = frozen();
        assert!(matches!(
            grad_estimate_coord_reform(&t, &other, &[0.35], &mut stream(0, &[])),
            Err(Error::Unsupported(_))
        ));
    }
}
