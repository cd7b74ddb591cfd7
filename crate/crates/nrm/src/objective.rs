//! Adapter exposing the negated revenue as an outer function for the generic optimizers.

use std::sync::Arc;

use hcopt_core::{BoxDomain, OuterFunction, PhiFamily, Problem, XiSampler};
use rand::RngCore;

use crate::error::Result;
use crate::gradient::{revenue_gradient_at, GradientMode};
use crate::instance::{sample_show_ups, NrmInstance};

/// `f(y) = -(r'y - Gamma(Z(y), service))` with fresh service randomness on every call.
#[derive(Debug, Clone)]
pub struct NrmObjective {
    pub instance: Arc<NrmInstance>,
    pub mode: GradientMode,
}

impl NrmObjective {
    fn revenue_sample(&self, y: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        let inst = &self.instance;
        let service = inst.sample_service(rng);
        let z = sample_show_ups(&inst.show_up.for_optimizer(), y, rng);
        let r = inst.revenue(&service);
        let l = inst.penalty(&service);
        let gamma = inst.recourse(&z, &service, &l)?.penalty;
        Ok(r.iter().zip(y).map(|(r, y)| r * y).sum::<f64>() - gamma)
    }

    fn revenue_gradient(&self, y: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let inst = &self.instance;
        let service = inst.sample_service(rng);
        let model = inst.show_up.for_optimizer();
        let z = sample_show_ups(&model, y, rng);
        revenue_gradient_at(inst, &model, &z, &service, self.mode)
    }
}

impl OuterFunction for NrmObjective {
    fn value(&self, y: &[f64], rng: &mut dyn RngCore) -> hcopt_core::Result<f64> {
        Ok(-self.revenue_sample(y, rng)?)
    }

    fn gradient(&self, y: &[f64], rng: &mut dyn RngCore) -> hcopt_core::Result<Vec<f64>> {
        Ok(self
            .revenue_gradient(y, rng)?
            .into_iter()
            .map(|g| -g)
            .collect())
    }
}

/// Booking-limit problem `min_{0 <= x <= upper} E[-revenue(x ∧ D)]`.
pub fn nrm_problem(instance: Arc<NrmInstance>, mode: GradientMode) -> Result<Problem> {
    let d = instance.classes();
    let domain = BoxDomain::uniform(d, 0.0, instance.upper)?;
    let sampler = XiSampler::new(instance.demand.clone())?;
    let scale = instance.gradient_scale();
    let outer = Arc::new(NrmObjective { instance, mode });
    Ok(Problem::new(
        domain,
        PhiFamily::trunc_min(),
        sampler,
        outer,
        scale,
    )?)
}
