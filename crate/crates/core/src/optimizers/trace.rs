use crate::stats::Estimate;

use super::config::Method;

/// Periodic Monte-Carlo evaluation of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectivePoint {
    pub iter: usize,
    pub samples_consumed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    Drift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub method: Method,
    /// `(t, x^{t+1})` kept every `thin` iterations.
    pub iterates: Vec<(usize, Vec<f64>)>,
    /// `||v(x^t)||` per iteration.
    pub grad_norms: Vec<f64>,
    pub objective_estimates: Vec<ObjectivePoint>,
    pub samples_consumed: u64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub wall_ms: f64,
    pub chosen_output: Vec<f64>,
    /// Objective at `chosen_output` when evaluation is enabled.
    pub final_objective: Option<Estimate>,
    /// Shrinking radius used by SAA+SG.
    pub delta: Option<f64>,
}
