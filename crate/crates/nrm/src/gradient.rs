//! Stochastic gradients of expected revenue in the booking limits.

use hcopt_core::estimators::{GradientKind, GradientSample};
use rand::RngCore;

use crate::error::Result;
use crate::instance::{sample_show_ups, NrmInstance, Service, ShowUp};

/// How `Gamma(Z + e_i) - Gamma(Z)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// `d + 1` LP solves.
    ExactDiff,
    /// One LP solve; the difference is replaced by `l_i - v2_i`.
    #[default]
    DualApprox,
}

/// Step for the one-sided derivative of `Gamma` in the all-show-up model.
pub const ALL_SHOW_UP_STEP: f64 = 1e-5;

/// `r - p * dGamma` at show-ups `z`, the gradient of one revenue sample in the accepted amounts.
pub fn revenue_gradient_at(
    inst: &NrmInstance,
    model: &ShowUp,
    z: &[f64],
    service: &Service,
    mode: GradientMode,
) -> Result<Vec<f64>> {
    let r = inst.revenue(service);
    let l = inst.penalty(service);
    let base = inst.recourse(z, service, &l)?;
    let d = z.len();
    let diff: Vec<f64> = match mode {
        GradientMode::DualApprox => (0..d).map(|i| l[i] - base.class_duals[i]).collect(),
        GradientMode::ExactDiff => {
            let h = if matches!(model, ShowUp::AllShowUp) {
                ALL_SHOW_UP_STEP
            } else {
                1.0
            };
            let mut bumped = z.to_vec();
            (0..d)
                .map(|i| {
                    bumped[i] += h;
                    let up = inst.recourse(&bumped, service, &l);
                    bumped[i] = z[i];
                    Ok((up?.penalty - base.penalty) / h)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok((0..d).map(|i| r[i] - model.prob(i) * diff[i]).collect())
}

/// One draw of the revenue gradient at booking limits `x`, including the truncation
/// indicator `1{x_i <= D_i}`. Show-ups follow the optimizer's continuous model.
pub fn nrm_outer_gradient<R: RngCore + ?Sized>(
    inst: &NrmInstance,
    x: &[f64],
    rng: &mut R,
    mode: GradientMode,
) -> Result<GradientSample> {
    let demand = inst.sample_demand(rng);
    let service = inst.sample_service(rng);
    let accepted: Vec<f64> = x.iter().zip(&demand).map(|(x, d)| x.min(*d)).collect();
    let model = inst.show_up.for_optimizer();
    let z = sample_show_ups(&model, &accepted, rng);
    let g = revenue_gradient_at(inst, &model, &z, &service, mode)?;
    let vector = g
        .into_iter()
        .zip(x.iter().zip(&demand))
        .map(|(g, (x, d))| if x <= d { g } else { 0.0 })
        .collect();
    Ok(GradientSample {
        vector,
        kind: GradientKind::Plain,
        samples_used: 1,
    })
}
