mod common;

use hcopt_core::optimizers::{
    run, run_msg, run_rsg, run_saa_sg, LambdaSchedule, Method, RunConfig, StepSchedule,
};
use hcopt_core::oracles::grid_global_min;

fn quiet(cfg: RunConfig) -> RunConfig {
    RunConfig {
        eval_every: 0,
        ..cfg
    }
}

#[test]
fn rsg_reaches_global_optimum() {
    let p = common::one_d();
    let cfg = quiet(RunConfig {
        step: StepSchedule::InvSqrt(0.5),
        ..RunConfig::new(Method::Rsg, 20_000, 1)
    });
    let tr = run_rsg(&p, &cfg).unwrap();
    let gap = common::one_d_exact(tr.chosen_output[0]) - common::ONE_D_OPT;
    assert!(gap <= 1e-3, "gap {gap}");
}

#[test]
fn msg_reaches_global_optimum() {
    let p = common::one_d();
    let t = 10_000;
    let gamma = (p.domain.radius() * t as f64).powf(-0.5);
    let cfg = quiet(RunConfig {
        step: StepSchedule::Constant(gamma),
        big_k: 10,
        ..RunConfig::new(Method::Msg, t, 2)
    });
    let tr = run_msg(&p, &cfg).unwrap();
    let gap = common::one_d_exact(tr.chosen_output[0]) - common::ONE_D_OPT;
    assert!(gap <= 1e-3, "gap {gap}");
}

#[test]
fn saa_reaches_global_optimum() {
    let p = common::one_d();
    let tr = run_saa_sg(&p, &quiet(RunConfig::theory_saa(20_000, 1, 1000, 3))).unwrap();
    let gap = common::one_d_exact(tr.chosen_output[0]) - common::ONE_D_OPT;
    assert!(gap <= 3e-3, "gap {gap}");
}

#[test]
fn coordinate_estimator_variant_converges() {
    let p = common::one_d();
    let cfg = RunConfig {
        coord_estimator: true,
        ..quiet(RunConfig::theory_saa(20_000, 1, 1000, 4))
    };
    let tr = run_saa_sg(&p, &cfg).unwrap();
    let gap = common::one_d_exact(tr.chosen_output[0]) - common::ONE_D_OPT;
    assert!(gap <= 3e-3, "gap {gap}");
}

#[test]
fn doubling_horizon_does_not_hurt_msg() {
    let p = common::one_d();
    let mut worse = 0;
    for rep in 0..20u64 {
        let gap = |t: usize| {
            let gamma = (p.domain.radius() * t as f64).powf(-0.5);
            let cfg = quiet(RunConfig {
                step: StepSchedule::Constant(gamma),
                ..RunConfig::new(Method::Msg, t, 100 + rep)
            });
            common::one_d_exact(run_msg(&p, &cfg).unwrap().chosen_output[0]) - common::ONE_D_OPT
        };
        if gap(4000) > gap(2000) {
            worse += 1;
        }
    }
    // one-sided sign test at 5%: P(Bin(20, 1/2) >= 15) < 0.05
    assert!(worse < 15, "{worse} of 20 repeats got worse");
}

#[test]
fn methods_agree_on_separable_instance() {
    let scales = [1.0, 1.5, 2.0, 2.5, 3.0];
    let p = common::separable(&scales);
    let configs = [
        RunConfig {
            step: StepSchedule::InvSqrt(0.5),
            ..RunConfig::new(Method::Rsg, 20_000, 5)
        },
        RunConfig {
            step: StepSchedule::InvSqrt(0.5),
            ..RunConfig::new(Method::Msg, 10_000, 6)
        },
        RunConfig {
            step: StepSchedule::InvSqrt(0.02),
            lambda: LambdaSchedule::Zero,
            n: 1000,
            ..RunConfig::new(Method::SaaSg, 20_000, 7)
        },
    ];
    let values: Vec<f64> = configs
        .iter()
        .map(|c| {
            common::separable_exact(&scales, &run(&p, &quiet(c.clone())).unwrap().chosen_output)
        })
        .collect();
    let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((worst - best) / best <= 0.01, "{values:?}");
}

#[test]
fn grid_oracle_dominates_optimizers() {
    let p = common::one_d();
    let oracle = grid_global_min(&p, 1e-3, 50_000, 9).unwrap();
    for m in [Method::Rsg, Method::Msg, Method::SaaSg] {
        let cfg = RunConfig {
            step: StepSchedule::InvSqrt(0.5),
            ..quiet(RunConfig::new(m, 5000, 10))
        };
        let cfg = if m == Method::SaaSg {
            quiet(RunConfig::theory_saa(5000, 1, 1000, 10))
        } else {
            cfg
        };
        let x = run(&p, &cfg).unwrap().chosen_output;
        let e = p.sample_objective(&x, 50_000, 9).unwrap();
        let tol = 2.0 * (oracle.stderr.powi(2) + e.stderr.powi(2)).sqrt();
        assert!(
            oracle.value <= e.mean + tol,
            "{m:?}: oracle {} vs {}",
            oracle.value,
            e.mean
        );
    }
}
