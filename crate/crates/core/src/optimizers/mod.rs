//! SG, RSG, MSG and SAA+SG loops.

mod config;
mod trace;

pub use config::{LambdaSchedule, Method, OutputRule, RunConfig, StepSchedule, StopRule};
pub use trace::{ObjectivePoint, RunTrace, StopReason};

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;

use crate::domain::BoxDomain;
use crate::error::{check_len, Error, Result};
use crate::estimators::{
    coord_reform_given, coord_support, grad_estimate_mirror_streams, grad_estimate_regularized,
    saa_reform_at_x, MirrorStreams,
};
use crate::problem::Problem;
use crate::rng::{self, slot, Stream};
use crate::transform::TransformEstimate;

/// True when the drift rule or the iteration cap says to stop, given the
/// iterate history `x^1..x^t`.
pub fn stop_check(iterates: &[Vec<f64>], rule: &StopRule, max_iters: usize) -> bool {
    let t = iterates.len();
    if t >= max_iters {
        return true;
    }
    match *rule {
        StopRule::FixedT => false,
        StopRule::AvgDrift { window, tol } => {
            if window == 0 || t < 2 * window {
                return false;
            }
            let prev = block_mean(&iterates[t - 2 * window..t - window]);
            let cur = block_mean(&iterates[t - window..]);
            distance(&prev, &cur) < tol
        }
    }
}

fn block_mean(xs: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = vec![0.0; xs[0].len()];
    for x in xs {
        acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
    }
    acc.into_iter().map(|a| a / xs.len() as f64).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Bookkeeping shared by every loop: output selection, drift stopping,
/// thinning and periodic evaluation.
struct Recorder<'a> {
    problem: &'a Problem,
    config: &'a RunConfig,
    start: Instant,
    eval_seed: u64,
    out_rng: Stream,
    chosen: Option<Vec<f64>>,
    tail: VecDeque<Vec<f64>>,
    block: Vec<f64>,
    block_len: usize,
    prev_block: Option<Vec<f64>>,
    trace: RunTrace,
}

impl<'a> Recorder<'a> {
    fn new(problem: &'a Problem, config: &'a RunConfig) -> Self {
        Self {
            problem,
            config,
            start: Instant::now(),
            eval_seed: rng::derive_seed(config.seed, &[slot::EVALUATION]),
            out_rng: rng::stream(config.seed, &[slot::OUTPUT]),
            chosen: None,
            tail: VecDeque::new(),
            block: vec![0.0; problem.dim()],
            block_len: 0,
            prev_block: None,
            trace: RunTrace {
                method: config.method,
                iterates: Vec::new(),
                grad_norms: Vec::new(),
                objective_estimates: Vec::new(),
                samples_consumed: 0,
                iterations: 0,
                stop_reason: StopReason::MaxIters,
                wall_ms: 0.0,
                chosen_output: Vec::new(),
                final_objective: None,
                delta: None,
            },
        }
    }

    fn wall_ms(&self) -> f64 {
        if self.config.record_timing {
            self.start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }

    fn evaluate(&mut self, iter: usize, x: &[f64]) -> Result<()> {
        let e = self
            .problem
            .sample_objective(x, self.config.eval_samples, self.eval_seed)?;
        let wall_ms = self.wall_ms();
        self.trace.objective_estimates.push(ObjectivePoint {
            iter,
            samples_consumed: self.trace.samples_consumed,
            mean: e.mean,
            stderr: e.stderr,
            wall_ms,
        });
        Ok(())
    }

    /// Called with the point `p^t` at which iteration `t` evaluates its gradient.
    fn before_step(&mut self, t: usize, p: &[f64]) {
        if self.config.output_rule == OutputRule::UniformRandomIterate
            && self.out_rng.random_range(0..t) == 0
        {
            self.chosen = Some(p.to_vec());
        }
    }

    /// Called after iteration `t` with the output-space point `p^{t+1}` and the
    /// decision-space iterate `x^{t+1}`. Returns true when the drift rule fires.
    fn after_step(
        &mut self,
        t: usize,
        p: &[f64],
        x: &[f64],
        grad_norm: f64,
        samples: u64,
    ) -> Result<bool> {
        self.trace.iterations = t;
        self.trace.samples_consumed += samples;
        self.trace.grad_norms.push(grad_norm);
        if self.config.thin > 0 && t % self.config.thin == 0 {
            self.trace.iterates.push((t, x.to_vec()));
        }
        match self.config.output_rule {
            OutputRule::TailAverage(w) => {
                if self.tail.len() == w {
                    self.tail.pop_front();
                }
                self.tail.push_back(p.to_vec());
            }
            OutputRule::Last => self.chosen = Some(p.to_vec()),
            OutputRule::UniformRandomIterate => {}
        }
        if self.config.eval_every > 0 && t % self.config.eval_every == 0 {
            self.evaluate(t, x)?;
        }
        if let StopRule::AvgDrift { window, tol } = self.config.stop_rule {
            self.block.iter_mut().zip(x).for_each(|(a, b)| *a += b);
            self.block_len += 1;
            if self.block_len == window {
                let mean: Vec<f64> = self.block.iter().map(|a| a / window as f64).collect();
                self.block.iter_mut().for_each(|a| *a = 0.0);
                self.block_len = 0;
                let fire = self
                    .prev_block
                    .as_ref()
                    .is_some_and(|prev| distance(prev, &mean) < tol);
                self.prev_block = Some(mean);
                if fire {
                    self.trace.stop_reason = StopReason::Drift;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Output-space point selected by the output rule.
    fn output(&mut self) -> Vec<f64> {
        match self.config.output_rule {
            OutputRule::TailAverage(_) => {
                let v: Vec<Vec<f64>> = self.tail.iter().cloned().collect();
                block_mean(&v)
            }
            _ => self.chosen.clone().expect("at least one iteration ran"),
        }
    }

    fn finish(mut self, output: Vec<f64>) -> Result<RunTrace> {
        if self.config.eval_every > 0 {
            let e =
                self.problem
                    .sample_objective(&output, self.config.eval_samples, self.eval_seed)?;
            self.trace.final_objective = Some(e);
        }
        self.trace.wall_ms = self.wall_ms();
        self.trace.chosen_output = output;
        Ok(self.trace)
    }
}

fn initial_point(problem: &Problem, config: &RunConfig) -> Result<Vec<f64>> {
    match &config.init {
        Some(x) => {
            check_len(problem.dim(), x.len())?;
            if !problem.domain.contains(x) {
                return Err(Error::Argument(
                    "initial point must lie in the feasible box".into(),
                ));
            }
            Ok(x.clone())
        }
        None => problem.domain.project(&vec![0.0; problem.dim()]),
    }
}

fn projected_loop(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    config.validate()?;
    let mut x = initial_point(problem, config)?;
    let mut rec = Recorder::new(problem, config);
    if config.eval_every > 0 {
        rec.evaluate(0, &x)?;
    }
    for t in 1..=config.max_iters {
        let gamma = config.step.at(t);
        let lambda = config.lambda.at(t);
        let mut g_rng = rng::stream(config.seed, &[t as u64, slot::GRADIENT]);
        let v = match config.method {
            Method::Sg | Method::Rsg => grad_estimate_regularized(problem, &x, lambda, &mut g_rng)?,
            Method::Msg => {
                let mut a = rng::stream(config.seed, &[t as u64, slot::INVERSE_A]);
                let mut b = rng::stream(config.seed, &[t as u64, slot::INVERSE_B]);
                grad_estimate_mirror_streams(
                    problem,
                    &x,
                    config.big_k,
                    lambda,
                    MirrorStreams {
                        inverse_a: &mut a,
                        inverse_b: &mut b,
                        gradient: &mut g_rng,
                    },
                )?
            }
            Method::SaaSg => unreachable!("handled by run_saa_sg"),
        };
        rec.before_step(t, &x);
        x.iter_mut()
            .zip(&v.vector)
            .for_each(|(xi, vi)| *xi -= gamma * vi);
        problem.domain.project_in_place(&mut x);
        debug_assert!(problem.domain.contains(&x));
        if rec.after_step(t, &x, &x, norm(&v.vector), v.samples_used)? {
            break;
        }
    }
    let out = rec.output();
    rec.finish(out)
}

/// Projected SGD, the `lambda = 0` case of RSG.
pub fn run_sg(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    let config = RunConfig {
        method: Method::Sg,
        lambda: LambdaSchedule::Zero,
        ..config.clone()
    };
    projected_loop(problem, &config)
}

/// Regularized projected SGD.
pub fn run_rsg(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    let config = RunConfig {
        method: Method::Rsg,
        ..config.clone()
    };
    projected_loop(problem, &config)
}

/// Projected SGD preconditioned by two randomized inverse-Jacobian estimates.
pub fn run_msg(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    let config = RunConfig {
        method: Method::Msg,
        ..config.clone()
    };
    projected_loop(problem, &config)
}

/// Projected SGD on the empirical reformulation in `u = g_hat(x)` space.
pub fn run_saa_sg(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    let config = RunConfig {
        method: Method::SaaSg,
        ..config.clone()
    };
    config.validate()?;
    if config.coord_estimator && !problem.phi.is_trunc_min() {
        return Err(Error::Unsupported(
            "the coordinate estimator is defined for the truncated-minimum family only".into(),
        ));
    }
    let d = problem.dim();
    let transform = TransformEstimate::freeze(problem, config.n, config.seed)?;
    let delta0 = config
        .delta0
        .unwrap_or(1.0 / ((d * config.max_iters) as f64).sqrt());
    let (delta, ubox) = transform.shrunken_image(delta0)?;
    let x1 = initial_point(problem, &config)?;
    let mut u = ubox.project(&transform.g(&x1)?)?;
    let mut x = transform.inverse(&u)?;
    let mut rec = Recorder::new(problem, &config);
    rec.trace.delta = Some(delta);
    rec.trace.samples_consumed = config.n as u64;
    if config.eval_every > 0 {
        rec.evaluate(0, &x)?;
    }
    for t in 1..=config.max_iters {
        let gamma = config.step.at(t);
        let mut g_rng = rng::stream(config.seed, &[t as u64, slot::GRADIENT]);
        let v = if config.coord_estimator {
            let mut choices = Vec::with_capacity(d);
            for i in 0..d {
                let support = coord_support(&transform, &x, i);
                if support.is_empty() {
                    return Err(Error::SingularTransform { coord: i });
                }
                choices.push(support[g_rng.random_range(0..support.len())]);
            }
            coord_reform_given(&transform, problem, &x, &choices, &mut g_rng)?
        } else {
            let index = g_rng.random_range(0..transform.n());
            saa_reform_at_x(&transform, problem, &x, index, &mut g_rng)?
        };
        rec.before_step(t, &u);
        u.iter_mut()
            .zip(&v.vector)
            .for_each(|(ui, vi)| *ui -= gamma * vi);
        ubox.project_in_place(&mut u);
        x = transform.inverse(&u)?;
        debug_assert!(problem.domain.contains(&x));
        if rec.after_step(t, &u, &x, norm(&v.vector), v.samples_used)? {
            break;
        }
    }
    let out = clamp_into(&rec.output(), &ubox);
    let x_out = transform.inverse(&out)?;
    rec.finish(x_out)
}

fn clamp_into(u: &[f64], b: &BoxDomain) -> Vec<f64> {
    b.project(u).expect("dimension matches")
}

/// Dispatches on `config.method`.
pub fn run(problem: &Problem, config: &RunConfig) -> Result<RunTrace> {
    match config.method {
        Method::Sg => run_sg(problem, config),
        Method::Rsg => run_rsg(problem, config),
        Method::Msg => run_msg(problem, config),
        Method::SaaSg => run_saa_sg(problem, config),
    }
}

#[cfg(test)]
mod tests;
