use std::sync::Arc;

use hcopt_core::oracles::finite_diff_grad;
use hcopt_core::rng::stream;
use hcopt_core::{BoxDomain, Dist, Moments};
use hcopt_nrm::{
    nrm_outer_gradient, scenario_revenue, tiny_instance, GradientMode, Marginal, Network,
    NrmInstance, PassengerNetwork, ShowUp,
};
use rand::{Rng, RngCore};

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Revenue of continuous limits `x` with all randomness from `rng`.
fn revenue_sample(inst: &NrmInstance, x: &[f64], rng: &mut dyn RngCore) -> f64 {
    let demand = inst.sample_demand(rng);
    let service = inst.sample_service(rng);
    let y: Vec<f64> = x.iter().zip(&demand).map(|(x, d)| x.min(*d)).collect();
    let r = inst.revenue(&service);
    let l = inst.penalty(&service);
    r.iter().zip(&y).map(|(r, y)| r * y).sum::<f64>()
        - inst.recourse(&y, &service, &l).unwrap().penalty
}

#[test]
fn exact_gradient_matches_finite_differences() {
    let inst = tiny_instance(0.5).unwrap();
    let domain = BoxDomain::uniform(3, 0.0, inst.upper).unwrap();
    let mut pick = stream(5, &[]);
    for k in 0..5u64 {
        let x: Vec<f64> = (0..3).map(|_| pick.random_range(2.0..9.0)).collect();
        let mut g = vec![Moments::default(); 3];
        let mut r = stream(6, &[k]);
        for _ in 0..100_000 {
            let v = nrm_outer_gradient(&inst, &x, &mut r, GradientMode::ExactDiff).unwrap();
            g.iter_mut().zip(&v.vector).for_each(|(m, v)| m.push(*v));
        }
        let fd = finite_diff_grad(
            |x, r| Ok(revenue_sample(&inst, x, r)),
            &domain,
            &x,
            1e-2,
            400_000,
            7 + k,
        )
        .unwrap();
        for i in 0..3 {
            let tol = 4.0 * combined(g[i].stderr(), fd.stderr[i]);
            assert!(
                (g[i].mean - fd.grad[i]).abs() <= tol,
                "x={x:?} i={i}: {} vs {}",
                g[i].mean,
                fd.grad[i]
            );
        }
    }
}

#[test]
fn exact_and_dual_modes_agree() {
    let inst = tiny_instance(0.5).unwrap();
    let x = [6.5, 5.5, 4.5];
    let (mut agree, n) = (0, 1000);
    let (mut me, mut md) = (vec![Moments::default(); 3], vec![Moments::default(); 3]);
    for j in 0..n {
        let e =
            nrm_outer_gradient(&inst, &x, &mut stream(8, &[j]), GradientMode::ExactDiff).unwrap();
        let d =
            nrm_outer_gradient(&inst, &x, &mut stream(8, &[j]), GradientMode::DualApprox).unwrap();
        if e.vector
            .iter()
            .zip(&d.vector)
            .all(|(a, b)| (a - b).abs() < 1e-4)
        {
            agree += 1;
        }
        for i in 0..3 {
            me[i].push(e.vector[i]);
            md[i].push(d.vector[i]);
        }
    }
    eprintln!("scenario-wise agreement {agree}/{n}");
    assert!(agree >= 950, "{agree}");
    for i in 0..3 {
        assert!((me[i].mean - md[i].mean).abs() <= 2.0 * combined(me[i].stderr(), md[i].stderr()));
    }
}

fn single_leg(capacity: f64, demand: f64) -> NrmInstance {
    NrmInstance::new(
        vec![
            Dist::Uniform {
                a: demand,
                b: demand
            };
            2
        ],
        ShowUp::AllShowUp,
        Network::Passenger(PassengerNetwork {
            consumption: vec![vec![1.0, 1.0]],
            capacity: vec![Marginal::point(capacity)],
            revenue: vec![5.0, 1.0],
            penalty: vec![10.0, 2.0],
        }),
        100.0,
    )
    .unwrap()
}

#[test]
fn ample_capacity_gives_revenue_gradient() {
    let inst = single_leg(1e6, 8.0);
    for mode in [GradientMode::ExactDiff, GradientMode::DualApprox] {
        let v = nrm_outer_gradient(&inst, &[3.0, 9.0], &mut stream(0, &[]), mode).unwrap();
        assert_eq!(v.vector, vec![5.0, 0.0]);
    }
}

#[test]
fn limits_above_demand_give_zero() {
    let inst = single_leg(5.0, 2.0);
    let v = nrm_outer_gradient(
        &inst,
        &[3.0, 4.0],
        &mut stream(0, &[]),
        GradientMode::DualApprox,
    )
    .unwrap();
    assert_eq!(v.vector, vec![0.0, 0.0]);
}

#[test]
fn revenue_is_concave_along_segments() {
    let inst = Arc::new(tiny_instance(0.5).unwrap());
    let mut pick = stream(9, &[]);
    for k in 0..20u64 {
        let a: Vec<f64> = (0..3).map(|_| pick.random_range(0.0..12.0)).collect();
        let b: Vec<f64> = (0..3).map(|_| pick.random_range(0.0..12.0)).collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut gap = Moments::default();
        for j in 0..2000u64 {
            // f(y) = r'y - E[Gamma(y, c)] evaluated at fixed accepted amounts
            let f = |y: &[f64]| {
                let mut r = stream(10, &[k, j]);
                let service = inst.sample_service(&mut r);
                let l = inst.penalty(&service);
                inst.revenue(&service)
                    .iter()
                    .zip(y)
                    .map(|(r, y)| r * y)
                    .sum::<f64>()
                    - inst.recourse(y, &service, &l).unwrap().penalty
            };
            gap.push(f(&mid) - 0.5 * (f(&a) + f(&b)));
        }
        assert!(gap.mean >= -3.0 * gap.stderr(), "segment {k}: {}", gap.mean);
    }
}

#[test]
fn deterministic_policy_value_is_exact() {
    let inst = single_leg(10.0, 8.0);
    let v = scenario_revenue(&inst, &[8.0, 4.0], 0, 0).unwrap();
    // accept (8, 4), serve (8, 2), reject two units of class 1 at penalty 2
    assert_eq!(v, 5.0 * 8.0 + 4.0 - 4.0);
}
