//! Monte-Carlo revenue of rounded booking limits on a frozen scenario set.

use hcopt_core::rng::stream;
use hcopt_core::{Estimate, Moments};
use rayon::prelude::*;

use crate::error::{NrmError, Result};
use crate::instance::{sample_show_ups, NrmInstance};

/// Scenario `j` draws demand and service randomness from stream `(seed, [j, 0])` and
/// show-ups from `(seed, [j, 1])`, so every policy sees the same scenarios.
pub fn scenario_revenue(inst: &NrmInstance, limits: &[f64], seed: u64, j: u64) -> Result<f64> {
    let mut base = stream(seed, &[j, 0]);
    let demand = inst.sample_demand(&mut base);
    let service = inst.sample_service(&mut base);
    let accepted: Vec<f64> = limits.iter().zip(&demand).map(|(x, d)| x.min(*d)).collect();
    let z = sample_show_ups(&inst.show_up, &accepted, &mut stream(seed, &[j, 1]));
    let r = inst.revenue(&service);
    let l = inst.penalty(&service);
    let gamma = inst.recourse(&z, &service, &l)?.penalty;
    Ok(r.iter().zip(&accepted).map(|(r, a)| r * a).sum::<f64>() - gamma)
}

/// Nearest-integer booking limits, never negative.
pub fn round_limits(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.round().max(0.0) + 0.0).collect()
}

/// Scenario-wise revenues of `round(x)` in scenario order.
pub fn policy_revenues(
    inst: &NrmInstance,
    x: &[f64],
    n_scenarios: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if x.len() != inst.classes() {
        return Err(NrmError::Core(hcopt_core::Error::Dimension {
            expected: inst.classes(),
            got: x.len(),
        }));
    }
    if n_scenarios == 0 {
        return Err(NrmError::Invalid(vec![
            "n_scenarios must be at least 1".into()
        ]));
    }
    let limits = round_limits(x);
    (0..n_scenarios as u64)
        .into_par_iter()
        .map(|j| scenario_revenue(inst, &limits, seed, j))
        .collect()
}

pub fn evaluate_policy(
    inst: &NrmInstance,
    x: &[f64],
    n_scenarios: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(Moments::from_slice(&policy_revenues(inst, x, n_scenarios, seed)?).estimate())
}
