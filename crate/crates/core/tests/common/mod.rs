#![allow(dead_code)]

use std::sync::Arc;

use hcopt_core::{BoxDomain, Dist, FnOuter, PhiFamily, PhiKind, Problem, Quadratic, XiSampler};

/// `F(x) = E[(x ∧ xi - 0.3)^2]` with `xi ~ U[0, 1]` on `X = [0, 0.9]`.
pub fn one_d() -> Problem {
    Problem::new(
        BoxDomain::uniform(1, 0.0, 0.9).unwrap(),
        PhiFamily::trunc_min(),
        XiSampler::iid(1, Dist::Uniform { a: 0.0, b: 1.0 }).unwrap(),
        Arc::new(Quadratic::centered(vec![0.3])),
        1.4,
    )
    .unwrap()
}

/// Exact objective of [`one_d`].
pub fn one_d_exact(x: f64) -> f64 {
    let e = x - 0.3;
    (e.powi(3) + 0.027) / 3.0 + (1.0 - x) * e * e
}

pub const ONE_D_OPT: f64 = 0.009;

/// Separable instance with `xi_i ~ U[0, b_i]`, `X_i = [0, 0.9 b_i]`, target `0.5 b_i`.
pub fn separable(scales: &[f64]) -> Problem {
    let d = scales.len();
    Problem::new(
        BoxDomain::new(vec![0.0; d], scales.iter().map(|b| 0.9 * b).collect()).unwrap(),
        PhiFamily::trunc_min(),
        XiSampler::new(
            scales
                .iter()
                .map(|&b| Dist::Uniform { a: 0.0, b })
                .collect(),
        )
        .unwrap(),
        Arc::new(Quadratic::centered(
            scales.iter().map(|b| 0.5 * b).collect(),
        )),
        scales.iter().map(|b| b * b).sum::<f64>().sqrt(),
    )
    .unwrap()
}

pub fn separable_exact(scales: &[f64], x: &[f64]) -> f64 {
    scales
        .iter()
        .zip(x)
        .map(|(&b, &x)| {
            let c = 0.5 * b;
            ((x - c).powi(3) + c.powi(3)) / (3.0 * b) + (1.0 - x / b) * (x - c).powi(2)
        })
        .sum()
}

/// The four families with samples drawn from `[0.5, 2]` and their Lipschitz bounds there.
pub fn families() -> Vec<PhiFamily> {
    vec![
        PhiFamily::trunc_min(),
        PhiFamily::new(PhiKind::Product, 2.0).unwrap(),
        PhiFamily::new(
            PhiKind::Saturating {
                alpha: 0.5,
                kappa: 0.5,
            },
            2.0_f64.sqrt() / 0.5,
        )
        .unwrap(),
        PhiFamily::new(PhiKind::Share { k: 3.0 }, 6.0).unwrap(),
    ]
}

/// `f(y) = y_1^2 + y_2^2 + y_1 y_2`.
pub fn coupled_outer() -> Arc<FnOuter> {
    Arc::new(FnOuter::new(
        |y| y[0] * y[0] + y[1] * y[1] + y[0] * y[1],
        |y| vec![2.0 * y[0] + y[1], 2.0 * y[1] + y[0]],
    ))
}
