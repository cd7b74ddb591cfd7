use std::sync::Arc;

use super::*;
use crate::phi::PhiFamily;
use crate::problem::Quadratic;
use crate::sampler::{Dist, XiSampler};

fn one_d(b: f64, hi: f64) -> Problem {
    Problem::new(
        BoxDomain::uniform(1, 0.0, hi).unwrap(),
        PhiFamily::trunc_min(),
        XiSampler::iid(1, Dist::Uniform { a: 0.0, b }).unwrap(),
        Arc::new(Quadratic::centered(vec![0.3])),
        2.0,
    )
    .unwrap()
}

fn quiet(method: Method, t: usize, seed: u64) -> RunConfig {
    RunConfig {
        eval_every: 0,
        ..RunConfig::new(method, t, seed)
    }
}

#[test]
fn stop_examples() {
    let rule = StopRule::practical();
    let constant = vec![vec![1.0]; 200];
    assert!(stop_check(&constant, &rule, 5000));
    let alternating: Vec<Vec<f64>> = (0..200).map(|t| vec![(t % 2) as f64]).collect();
    assert!(stop_check(&alternating, &rule, 5000));
    let mut drifting: Vec<Vec<f64>> = vec![vec![0.0]; 100];
    drifting.extend(vec![vec![10.0]; 100]);
    assert!(!stop_check(&drifting, &rule, 5000));
    let mut capped: Vec<Vec<f64>> = vec![vec![0.0]; 4900];
    capped.extend(vec![vec![10.0]; 100]);
    assert!(stop_check(&capped, &rule, 5000));
    assert!(!stop_check(&constant[..150], &rule, 5000));
    assert!(!stop_check(&constant, &StopRule::FixedT, 5000));
}

#[test]
fn sg_stalls_above_support() {
    let p = one_d(0.5, 1.0);
    let cfg = RunConfig {
        init: Some(vec![0.9]),
        step: StepSchedule::InvSqrt(0.5),
        ..quiet(Method::Sg, 1000, 1)
    };
    let tr = run_sg(&p, &cfg).unwrap();
    assert!(tr.iterates.iter().all(|(_, x)| x[0] == 0.9));
    assert!(tr.grad_norms.iter().all(|&g| g == 0.0));
}

#[test]
fn rsg_shrinks_geometrically_above_support() {
    let p = one_d(0.5, 1.0);
    let (gamma, lambda) = (0.1, 0.5);
    let cfg = RunConfig {
        init: Some(vec![0.9]),
        step: StepSchedule::Constant(gamma),
        lambda: LambdaSchedule::Constant(lambda),
        ..quiet(Method::Rsg, 200, 2)
    };
    let tr = run_rsg(&p, &cfg).unwrap();
    let mut x = 0.9;
    for (_, it) in &tr.iterates {
        if x < 0.5 {
            break;
        }
        x *= 1.0 - gamma * lambda;
        assert!((it[0] - x).abs() < 1e-14, "{} vs {}", it[0], x);
    }
    assert!(x < 0.5);
}

#[test]
fn msg_with_k_one_is_scaled_sg() {
    let p = one_d(1.0, 0.9);
    let base = RunConfig {
        step: StepSchedule::InvSqrt(0.4),
        lambda: LambdaSchedule::Zero,
        output_rule: OutputRule::Last,
        ..quiet(Method::Msg, 500, 3)
    };
    let msg = run_msg(
        &p,
        &RunConfig {
            big_k: 1,
            ..base.clone()
        },
    )
    .unwrap();
    let sg = run_sg(
        &p,
        &RunConfig {
            step: StepSchedule::InvSqrt(0.1),
            ..base
        },
    )
    .unwrap();
    assert_eq!(msg.iterates, sg.iterates);
}

#[test]
fn msg_sample_rate() {
    let p = one_d(1.0, 0.9);
    let tr = run_msg(
        &p,
        &RunConfig {
            big_k: 10,
            ..quiet(Method::Msg, 1000, 4)
        },
    )
    .unwrap();
    let rate = tr.samples_consumed as f64 / tr.iterations as f64;
    assert!((rate - 10.0).abs() < 0.5, "{rate}");
}

#[test]
fn runs_are_bit_identical() {
    let p = one_d(1.0, 0.9);
    for m in [Method::Sg, Method::Rsg, Method::Msg, Method::SaaSg] {
        let cfg = RunConfig {
            eval_every: 100,
            eval_samples: 200,
            n: 50,
            ..RunConfig::new(m, 300, 5)
        };
        assert_eq!(run(&p, &cfg).unwrap(), run(&p, &cfg).unwrap(), "{m:?}");
    }
}

#[test]
fn iterates_stay_feasible() {
    let p = one_d(1.0, 0.9);
    for m in [Method::Rsg, Method::Msg, Method::SaaSg] {
        let cfg = RunConfig {
            step: StepSchedule::InvSqrt(5.0),
            n: 30,
            ..quiet(m, 400, 6)
        };
        let tr = run(&p, &cfg).unwrap();
        assert!(
            tr.iterates.iter().all(|(_, x)| p.domain.contains(x)),
            "{m:?}"
        );
        assert!(p.domain.contains(&tr.chosen_output));
    }
}

#[test]
fn saa_single_sample_radius() {
    let p = Problem::new(
        BoxDomain::uniform(1, 0.0, 1.0).unwrap(),
        PhiFamily::trunc_min(),
        XiSampler::iid(
            1,
            Dist::Discrete {
                support: vec![0.4],
                weights: vec![1.0],
            },
        )
        .unwrap(),
        Arc::new(Quadratic::centered(vec![0.3])),
        2.0,
    )
    .unwrap();
    let cfg = RunConfig {
        n: 1,
        delta0: Some(1.0),
        ..quiet(Method::SaaSg, 10, 7)
    };
    assert_eq!(run_saa_sg(&p, &cfg).unwrap().delta, Some(0.2));
    let cfg = RunConfig {
        n: 1,
        delta0: Some(0.05),
        ..quiet(Method::SaaSg, 10, 7)
    };
    assert_eq!(run_saa_sg(&p, &cfg).unwrap().delta, Some(0.05));
}

#[test]
fn saa_degenerate_samples() {
    let p = Problem::new(
        BoxDomain::uniform(1, 0.5, 1.0).unwrap(),
        PhiFamily::trunc_min(),
        XiSampler::iid(1, Dist::Uniform { a: 0.0, b: 0.4 }).unwrap(),
        Arc::new(Quadratic::centered(vec![0.3])),
        2.0,
    )
    .unwrap();
    assert!(matches!(
        run_saa_sg(&p, &quiet(Method::SaaSg, 10, 8)),
        Err(Error::Instance(_))
    ));
}

#[test]
fn objective_trend_is_downward() {
    let p = one_d(1.0, 0.9);
    for m in [Method::Rsg, Method::Msg, Method::SaaSg] {
        let base = match m {
            Method::SaaSg => RunConfig::theory_saa(2000, 1, 1000, 11),
            _ => RunConfig {
                step: StepSchedule::InvSqrt(0.5),
                ..RunConfig::new(m, 2000, 11)
            },
        };
        let cfg = RunConfig {
            init: Some(vec![0.9]),
            eval_every: 100,
            eval_samples: 20_000,
            ..base
        };
        let tr = run(&p, &cfg).unwrap();
        let at = |it: usize| {
            tr.objective_estimates
                .iter()
                .find(|o| o.iter == it)
                .unwrap()
                .mean
        };
        assert!(at(2000) < at(100), "{m:?}: {} vs {}", at(2000), at(100));
    }
}

#[test]
fn drift_rule_stops_early() {
    let p = one_d(1.0, 0.9);
    let cfg = RunConfig {
        stop_rule: StopRule::practical(),
        ..quiet(Method::Rsg, 5000, 9)
    };
    let tr = run_rsg(&p, &cfg).unwrap();
    assert_eq!(tr.stop_reason, StopReason::Drift);
    assert_eq!(tr.iterations, 200);
}

#[test]
fn config_validation() {
    assert!(quiet(Method::Rsg, 0, 0).validate().is_err());
    assert!(RunConfig {
        step: StepSchedule::Constant(0.0),
        ..quiet(Method::Rsg, 5, 0)
    }
    .validate()
    .is_err());
    assert!(RunConfig {
        lambda: LambdaSchedule::Inverse,
        ..quiet(Method::Sg, 5, 0)
    }
    .validate()
    .is_err());
    assert!(RunConfig {
        big_k: 0,
        ..quiet(Method::Msg, 5, 0)
    }
    .validate()
    .is_err());
    assert_eq!("saa+sg".parse::<Method>().unwrap(), Method::SaaSg);
}
