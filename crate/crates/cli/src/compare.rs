//! `hcopt compare`: booking-limit policies on common random numbers.

use std::path::{Path, PathBuf};

use hcopt_core::optimizers::{run, Method};
use hcopt_core::stats::paired_t_test;
use hcopt_core::{Estimate, Moments};
use hcopt_nrm::{dlp_booking_limits, policy_revenues, NrmInstance};
use rayon::prelude::*;

use crate::config::PolicySpec;
use crate::error::RunError;
use crate::output::{create_dir, num, vector, write_text, Table};
use crate::resolve::Resolved;

/// Upper limit on `candidates * scenarios` for enumerated policies.
pub const ENUMERATION_BUDGET: f64 = 2.5e7;

pub struct PolicyResult {
    pub label: String,
    pub limits: Vec<f64>,
    pub revenue: Estimate,
    pub revenues: Vec<f64>,
}

pub struct Comparison {
    pub dir: PathBuf,
    pub policies: Vec<(String, Result<PolicyResult, String>)>,
}

impl Comparison {
    pub fn get(&self, label: &str) -> Option<&PolicyResult> {
        self.policies
            .iter()
            .find(|(l, _)| l == label)
            .and_then(|(_, r)| r.as_ref().ok())
    }
}

enum Source<'a> {
    Method(usize),
    Policy(&'a PolicySpec),
}

/// Best vector in `{0..max}^d` by mean revenue on the evaluation scenarios; ties go to the
/// first in lexicographic order.
pub fn enumerate_best(
    inst: &NrmInstance,
    max: u32,
    n: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64), RunError> {
    let d = inst.classes();
    let count = (max as f64 + 1.0).powi(d as i32);
    if count * n as f64 > ENUMERATION_BUDGET {
        return Err(hcopt_core::Error::CostGuard(format!(
            "enumerating {count} candidates on {n} scenarios exceeds the budget of {ENUMERATION_BUDGET} evaluations"
        ))
        .into());
    }
    let base = max as usize + 1;
    let candidate = |mut k: usize| {
        let mut x = vec![0.0; d];
        for slot in x.iter_mut().rev() {
            *slot = (k % base) as f64;
            k /= base;
        }
        x
    };
    let values: Vec<f64> = (0..count as usize)
        .into_par_iter()
        .map(|k| Ok(Moments::from_slice(&policy_revenues(inst, &candidate(k), n, seed)?).mean))
        .collect::<Result<_, RunError>>()?;
    let (k, v) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, v)| {
            if *v > best.1 {
                (k, *v)
            } else {
                best
            }
        });
    Ok((candidate(k), v))
}

fn limits(res: &Resolved, inst: &NrmInstance, src: &Source) -> Result<Vec<f64>, RunError> {
    let ev = &res.config.evaluation;
    Ok(match src {
        Source::Method(m) => run(res.target.problem(), &res.methods[*m].config)?.chosen_output,
        Source::Policy(PolicySpec::Dlp { .. }) => dlp_booking_limits(inst)?.x,
        Source::Policy(PolicySpec::Fixed { x, .. }) => x.clone(),
        Source::Policy(PolicySpec::Enumerate { max, .. }) => {
            enumerate_best(inst, *max, ev.n_scenarios, ev.seed)?.0
        }
    })
}

pub fn run_compare(res: &Resolved, dir: &Path) -> Result<Comparison, RunError> {
    let inst = res.nrm()?.clone();
    let mut sources: Vec<(String, Source)> = res
        .methods
        .iter()
        .enumerate()
        .map(|(i, m)| (m.label.clone(), Source::Method(i)))
        .collect();
    sources.extend(
        res.config
            .policies
            .iter()
            .map(|p| (p.label(), Source::Policy(p))),
    );
    let has_msg = res.methods.iter().any(|m| m.config.method == Method::Msg);
    let has_dlp = res
        .config
        .policies
        .iter()
        .any(|p| matches!(p, PolicySpec::Dlp { .. }));
    if !(has_msg || has_dlp) {
        return Err(crate::diag::ConfigError {
            file: res.source.clone(),
            location: None,
            message: "`compare` needs an MSG method or a DLP policy".into(),
        }
        .into());
    }
    create_dir(dir)?;
    let ev = &res.config.evaluation;
    let policies: Vec<(String, Result<PolicyResult, String>)> = sources
        .par_iter()
        .map(|(label, src)| {
            let result = limits(res, &inst, src).and_then(|x| {
                let revenues = policy_revenues(&inst, &x, ev.n_scenarios, ev.seed)?;
                Ok(PolicyResult {
                    label: label.clone(),
                    limits: hcopt_nrm::round_limits(&x),
                    revenue: Moments::from_slice(&revenues).estimate(),
                    revenues,
                })
            });
            (label.clone(), result.map_err(|e| e.to_string()))
        })
        .collect();

    let mut table = Table::new(&[
        "policy",
        "mean_revenue",
        "stderr",
        "booking_limits",
        "status",
        "message",
    ]);
    for (label, r) in &policies {
        table.push(match r {
            Ok(p) => vec![
                label.clone(),
                num(p.revenue.mean),
                num(p.revenue.stderr),
                vector(&p.limits),
                "ok".into(),
                String::new(),
            ],
            Err(m) => vec![
                label.clone(),
                "NaN".into(),
                "NaN".into(),
                String::new(),
                "error".into(),
                m.clone(),
            ],
        });
    }
    table.write(&dir.join("compare.csv"), &res.hash, ev.seed)?;

    let ok: Vec<&PolicyResult> = policies
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .collect();
    let mut pairs = Table::new(&[
        "policy",
        "baseline",
        "relative_improvement",
        "mean_diff",
        "diff_stderr",
        "t",
        "p_value",
        "significant",
    ]);
    for (i, a) in ok.iter().enumerate() {
        for b in ok.iter().skip(i + 1) {
            let test = paired_t_test(&a.revenues, &b.revenues);
            let base = b.revenue.mean.abs();
            let rel = if base > 0.0 {
                test.mean_diff / base
            } else {
                f64::NAN
            };
            pairs.push(vec![
                a.label.clone(),
                b.label.clone(),
                num(rel),
                num(test.mean_diff),
                num(test.stderr),
                num(test.t),
                num(test.p_value),
                test.significant(0.95).to_string(),
            ]);
        }
    }
    pairs.write(&dir.join("pairwise.csv"), &res.hash, ev.seed)?;
    write_text(&dir.join("config.resolved.toml"), &res.text)?;
    let failed = policies.iter().filter(|(_, r)| r.is_err()).count();
    if failed > 0 {
        return Err(RunError::Partial(format!(
            "{failed} polic{} failed; see compare.csv",
            if failed == 1 { "y" } else { "ies" }
        )));
    }
    Ok(Comparison {
        dir: dir.to_path_buf(),
        policies,
    })
}
