//! `hcopt run`: every method, every repeat, with traces and a summary.

use std::path::{Path, PathBuf};

use hcopt_core::optimizers::{run, RunTrace};
use hcopt_core::Estimate;
use hcopt_nrm::evaluate_policy;
use rayon::prelude::*;

use crate::error::RunError;
use crate::output::{create_dir, num, write_text, Table};
use crate::resolve::{Resolved, Target};

pub struct MethodRun {
    pub trace: RunTrace,
    /// Revenue for revenue-management problems, objective otherwise.
    pub value: Estimate,
}

pub struct Outcome {
    pub label: String,
    pub repeat: usize,
    pub seed: u64,
    pub result: Result<MethodRun, String>,
}

pub struct Report {
    pub dir: PathBuf,
    pub outcomes: Vec<Outcome>,
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.result.is_err()).count()
    }
}

/// Value of the final decision on the shared evaluation scenarios.
pub fn final_value(res: &Resolved, x: &[f64]) -> Result<Estimate, RunError> {
    let ev = &res.config.evaluation;
    Ok(match &res.target {
        Target::Synthetic(p) => p.sample_objective(x, ev.n_scenarios, ev.seed)?,
        Target::Nrm { instance, .. } => evaluate_policy(instance, x, ev.n_scenarios, ev.seed)?,
    })
}

fn run_one(res: &Resolved, method: usize, seed: u64) -> Result<MethodRun, RunError> {
    let mut cfg = res.methods[method].config.clone();
    cfg.seed = seed;
    let trace = run(res.target.problem(), &cfg)?;
    let value = final_value(res, &trace.chosen_output)?;
    Ok(MethodRun { trace, value })
}

pub fn run_methods(res: &Resolved) -> Vec<Outcome> {
    let e = &res.config.experiment;
    let jobs: Vec<(usize, usize)> = (0..res.methods.len())
        .flat_map(|m| (0..e.repeat).map(move |r| (m, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(m, r)| {
            let seed = e.seed + r as u64;
            Outcome {
                label: res.methods[m].label.clone(),
                repeat: r,
                seed,
                result: run_one(res, m, seed).map_err(|err| err.to_string()),
            }
        })
        .collect()
}

fn trace_table(t: &RunTrace) -> Table {
    let mut table = Table::new(&[
        "iter",
        "samples_consumed",
        "mc_objective",
        "mc_stderr",
        "wall_ms",
    ]);
    for p in &t.objective_estimates {
        table.push(vec![
            p.iter.to_string(),
            p.samples_consumed.to_string(),
            num(p.mean),
            num(p.stderr),
            num(p.wall_ms),
        ]);
    }
    table
}

pub fn run_experiment(res: &Resolved, dir: &Path) -> Result<Report, RunError> {
    create_dir(dir)?;
    let outcomes = run_methods(res);
    let repeats = res.config.experiment.repeat;
    let mut files = Vec::new();
    let mut summary = Table::new(&[
        "method",
        "final_revenue_or_objective",
        "stderr",
        "iters",
        "samples",
        "seconds",
        "repeat",
        "seed",
        "status",
        "message",
    ]);
    for o in &outcomes {
        let common = [o.repeat.to_string(), o.seed.to_string()];
        match &o.result {
            Ok(r) => {
                let name = if repeats > 1 {
                    format!("trace_{}_r{}.csv", o.label, o.repeat)
                } else {
                    format!("trace_{}.csv", o.label)
                };
                let path = dir.join(name);
                trace_table(&r.trace).write(&path, &res.hash, o.seed)?;
                files.push(path);
                let mut row = vec![
                    o.label.clone(),
                    num(r.value.mean),
                    num(r.value.stderr),
                    r.trace.iterations.to_string(),
                    r.trace.samples_consumed.to_string(),
                    num(r.trace.wall_ms / 1000.0),
                ];
                row.extend(common);
                row.extend(["ok".into(), String::new()]);
                summary.push(row);
            }
            Err(msg) => {
                let mut row = vec![
                    o.label.clone(),
                    "NaN".into(),
                    "NaN".into(),
                    "0".into(),
                    "0".into(),
                    "0".into(),
                ];
                row.extend(common);
                row.extend(["error".into(), msg.clone()]);
                summary.push(row);
            }
        }
    }
    let path = dir.join("summary.csv");
    summary.write(&path, &res.hash, res.config.experiment.seed)?;
    files.push(path);
    let path = dir.join("config.resolved.toml");
    write_text(&path, &res.text)?;
    files.push(path);
    Ok(Report {
        dir: dir.to_path_buf(),
        outcomes,
        files,
    })
}
