//! `hcopt oracle`: independent checks of a configured problem and its methods.

use std::path::{Path, PathBuf};

use hcopt_core::estimators::grad_estimate_plain;
use hcopt_core::optimizers::run;
use hcopt_core::oracles::{closed_form_g, finite_diff_grad_problem, grid_global_min};
use hcopt_core::rng::stream;
use hcopt_core::stats::try_par_moments_vec;
use hcopt_core::{estimate_g, Dist, Problem};
use hcopt_nrm::{
    dlp_booking_limits, evaluate_policy, nrm_outer_gradient, GradientMode, NrmInstance,
};
use rayon::prelude::*;

use crate::compare::{enumerate_best, ENUMERATION_BUDGET};
use crate::error::RunError;
use crate::experiment::final_value;
use crate::output::{create_dir, num, write_text, Table};
use crate::resolve::{Resolved, Target};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    pub reference: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(
        name: impl Into<String>,
        value: f64,
        stderr: f64,
        reference: f64,
        pass: bool,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            stderr,
            reference,
            pass,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl ToString) -> Self {
        Self::new(name, f64::NAN, f64::NAN, f64::NAN, false, err.to_string())
    }
}

pub struct OracleReport {
    pub dir: PathBuf,
    pub checks: Vec<Check>,
}

/// Grid spacing keeping `nodes * n_mc` near 2e7, with 50 to 4000 nodes.
fn grid_step(problem: &Problem, n_mc: usize) -> f64 {
    let d = problem.dim() as f64;
    let nodes = (2e7 / n_mc as f64).clamp(50.0, 4000.0);
    let per_axis = nodes.powf(1.0 / d).floor().max(2.0);
    let width = problem
        .domain
        .lower()
        .iter()
        .zip(problem.domain.upper())
        .map(|(l, u)| u - l)
        .fold(0.0, f64::max);
    (width / (per_axis - 1.0)).max(1e-9)
}

fn midpoint(problem: &Problem) -> Vec<f64> {
    problem
        .domain
        .lower()
        .iter()
        .zip(problem.domain.upper())
        .map(|(l, u)| 0.5 * (l + u))
        .collect()
}

fn synthetic_checks(res: &Resolved, problem: &Problem) -> Vec<Check> {
    let ev = &res.config.evaluation;
    let mut checks = Vec::new();
    let x = midpoint(problem);

    if problem.phi.is_trunc_min() {
        match estimate_g(problem, &x, ev.n_scenarios.max(10_000), ev.seed) {
            Ok(g) => {
                for (i, dist) in problem.sampler.dists().iter().enumerate() {
                    if matches!(dist, Dist::Poisson { .. } | Dist::Binomial { .. }) {
                        continue;
                    }
                    match closed_form_g(dist, x[i]) {
                        Ok(c) => {
                            let ok = (g.mean[i] - c.value).abs() <= 4.0 * g.stderr[i] + 1e-12;
                            checks.push(Check::new(
                                format!("g_closed_form_{i}"),
                                g.mean[i],
                                g.stderr[i],
                                c.value,
                                ok,
                                "at box midpoint",
                            ));
                        }
                        Err(e) => checks.push(Check::failed(format!("g_closed_form_{i}"), e)),
                    }
                }
            }
            Err(e) => checks.push(Check::failed("g_closed_form", e)),
        }
    }

    let n = ev.n_scenarios.max(10_000);
    let fd = finite_diff_grad_problem(problem, &x, 1e-2, n, ev.seed);
    let est = try_par_moments_vec(n, problem.dim(), |j| {
        grad_estimate_plain(problem, &x, &mut stream(ev.seed ^ 0x5eed, &[j as u64]))
            .map(|g| g.vector)
    });
    match (fd, est) {
        (Ok(fd), Ok(m)) => {
            for (i, mi) in m.iter().enumerate() {
                let se = (mi.stderr().powi(2) + fd.stderr[i].powi(2)).sqrt();
                let ok = (mi.mean - fd.grad[i]).abs() <= 4.0 * se + 2e-2;
                checks.push(Check::new(
                    format!("gradient_fd_{i}"),
                    mi.mean,
                    mi.stderr(),
                    fd.grad[i],
                    ok,
                    "plain estimator vs finite differences",
                ));
            }
        }
        (Err(e), _) | (_, Err(e)) => checks.push(Check::failed("gradient_fd", e)),
    }

    let grid = grid_global_min(
        problem,
        grid_step(problem, ev.n_scenarios),
        ev.n_scenarios,
        ev.seed,
    );
    match &grid {
        Ok(g) => checks.push(Check::new(
            "grid_min",
            g.value,
            g.stderr,
            g.value,
            true,
            format!("step {}", num(g.resolution.unwrap_or(0.0))),
        )),
        Err(e) => checks.push(Check::failed("grid_min", e)),
    }
    let runs: Vec<Check> = res
        .methods
        .par_iter()
        .map(|m| {
            let name = format!("method_{}", m.label);
            let value = run(problem, &m.config)
                .map_err(RunError::from)
                .and_then(|t| final_value(res, &t.chosen_output));
            match (value, &grid) {
                (Ok(v), Ok(g)) => {
                    let se = (v.stderr.powi(2) + g.stderr.powi(2)).sqrt();
                    Check::new(
                        name,
                        v.mean,
                        v.stderr,
                        g.value,
                        g.value <= v.mean + 3.0 * se,
                        "grid minimum does not exceed the method",
                    )
                }
                (Ok(v), Err(_)) => {
                    Check::new(name, v.mean, v.stderr, f64::NAN, true, "no grid reference")
                }
                (Err(e), _) => Check::failed(name, e),
            }
        })
        .collect();
    checks.extend(runs);
    checks
}

/// Fraction of scenarios where the two gradient modes agree to `tol` in every coordinate.
pub fn mode_agreement(
    inst: &NrmInstance,
    x: &[f64],
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<f64, RunError> {
    let hits: Vec<bool> = (0..n as u64)
        .into_par_iter()
        .map(|j| {
            let a = nrm_outer_gradient(inst, x, &mut stream(seed, &[j]), GradientMode::ExactDiff)?;
            let b = nrm_outer_gradient(inst, x, &mut stream(seed, &[j]), GradientMode::DualApprox)?;
            Ok(a.vector
                .iter()
                .zip(&b.vector)
                .all(|(u, v)| (u - v).abs() <= tol * (1.0 + u.abs())))
        })
        .collect::<Result<_, RunError>>()?;
    Ok(hits.iter().filter(|h| **h).count() as f64 / n as f64)
}

fn nrm_checks(res: &Resolved, inst: &NrmInstance) -> Vec<Check> {
    let ev = &res.config.evaluation;
    let mut checks = Vec::new();
    let dlp = dlp_booking_limits(inst);
    let mut probe = vec![0.5; inst.classes()];
    match &dlp {
        Ok(s) => {
            probe = s.x.iter().map(|v| v + 0.5).collect();
            match evaluate_policy(inst, &s.x, ev.n_scenarios, ev.seed) {
                Ok(e) => checks.push(Check::new(
                    "dlp_revenue",
                    e.mean,
                    e.stderr,
                    s.objective,
                    e.mean <= s.objective + 3.0 * e.stderr + 1e-9,
                    "simulated revenue vs the fluid bound",
                )),
                Err(e) => checks.push(Check::failed("dlp_revenue", e)),
            }
        }
        Err(e) => checks.push(Check::failed("dlp_revenue", e)),
    }

    match mode_agreement(inst, &probe, 1000, ev.seed, 1e-6) {
        Ok(f) => checks.push(Check::new(
            "gradient_mode_agreement",
            f,
            0.0,
            0.95,
            f >= 0.95,
            "exact vs dual gradients, scenario-wise",
        )),
        Err(e) => checks.push(Check::failed("gradient_mode_agreement", e)),
    }

    let max = inst.upper.min(10.0) as u32;
    let affordable = (max as f64 + 1.0).powi(inst.classes() as i32) * ev.n_scenarios as f64
        <= ENUMERATION_BUDGET;
    let best = if affordable {
        Some(enumerate_best(inst, max, ev.n_scenarios, ev.seed))
    } else {
        None
    };
    match &best {
        Some(Ok((x, v))) => checks.push(Check::new(
            "enumerated_best",
            *v,
            0.0,
            *v,
            true,
            format!("limits {}", crate::output::vector(x)),
        )),
        Some(Err(e)) => checks.push(Check::failed("enumerated_best", e)),
        None => {}
    }
    for m in &res.methods {
        let name = format!("method_{}", m.label);
        let value = run(res.target.problem(), &m.config)
            .map_err(RunError::from)
            .and_then(|t| Ok((final_value(res, &t.chosen_output)?, t.chosen_output)));
        checks.push(match (value, &best) {
            (Ok((v, x)), Some(Ok((_, b)))) => {
                let inside = x.iter().all(|xi| xi.round() <= max as f64);
                let ok = !inside || v.mean <= b + 1e-9;
                let gap = if *b != 0.0 {
                    100.0 * (b - v.mean) / b.abs()
                } else {
                    0.0
                };
                Check::new(
                    name,
                    v.mean,
                    v.stderr,
                    *b,
                    ok,
                    format!("gap to enumeration {}%", num((gap * 100.0).round() / 100.0)),
                )
            }
            (Ok((v, _)), _) => Check::new(
                name,
                v.mean,
                v.stderr,
                f64::NAN,
                true,
                "no enumeration reference",
            ),
            (Err(e), _) => Check::failed(name, e),
        });
    }
    checks
}

pub fn run_oracle(res: &Resolved, dir: &Path) -> Result<OracleReport, RunError> {
    create_dir(dir)?;
    let checks = match &res.target {
        Target::Synthetic(p) => synthetic_checks(res, p),
        Target::Nrm { instance, .. } => nrm_checks(res, instance),
    };
    let mut table = Table::new(&["check", "value", "stderr", "reference", "pass", "detail"]);
    for c in &checks {
        table.push(vec![
            c.name.clone(),
            num(c.value),
            num(c.stderr),
            num(c.reference),
            c.pass.to_string(),
            c.detail.clone(),
        ]);
    }
    table.write(
        &dir.join("oracle.csv"),
        &res.hash,
        res.config.evaluation.seed,
    )?;
    write_text(&dir.join("config.resolved.toml"), &res.text)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(RunError::Partial(format!(
            "{failed} oracle check(s) failed; see {}",
            dir.join("oracle.csv").display()
        )));
    }
    Ok(OracleReport {
        dir: dir.to_path_buf(),
        checks,
    })
}
