use hcopt_core::rng::stream;
use hcopt_nrm::{gamma_aircargo, gamma_passenger};
use rand::Rng;

#[test]
fn passenger_gamma_is_convex_in_show_ups() {
    let mut r = stream(1, &[]);
    let a = vec![
        vec![1.0, 0.0, 1.0, 1.0],
        vec![0.0, 1.0, 1.0, 0.0],
        vec![1.0, 1.0, 0.0, 2.0],
    ];
    for _ in 0..200 {
        let c: Vec<f64> = (0..3).map(|_| r.random_range(0.0..10.0)).collect();
        let l: Vec<f64> = (0..4).map(|_| r.random_range(0.5..5.0)).collect();
        let z1: Vec<f64> = (0..4).map(|_| r.random_range(0.0..10.0)).collect();
        let z2: Vec<f64> = (0..4).map(|_| r.random_range(0.0..10.0)).collect();
        let t: f64 = r.random_range(0.01..0.99);
        let mid: Vec<f64> = z1
            .iter()
            .zip(&z2)
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect();
        let g = |z: &[f64]| gamma_passenger(z, &c, &a, &l).unwrap().penalty;
        assert!(g(&mid) <= t * g(&z1) + (1.0 - t) * g(&z2) + 1e-6);
    }
}

#[test]
fn cargo_gamma_is_convex_in_show_ups() {
    let mut r = stream(2, &[]);
    let routes = vec![vec![vec![0], vec![1, 2]], vec![vec![1]], vec![vec![2]]];
    for _ in 0..200 {
        let w: Vec<f64> = (0..3).map(|_| r.random_range(0.5..3.0)).collect();
        let v: Vec<f64> = (0..3).map(|_| r.random_range(0.5..3.0)).collect();
        let cw: Vec<f64> = (0..3).map(|_| r.random_range(0.0..15.0)).collect();
        let cv: Vec<f64> = (0..3).map(|_| r.random_range(0.0..15.0)).collect();
        let l: Vec<f64> = (0..3).map(|_| r.random_range(0.5..5.0)).collect();
        let z1: Vec<f64> = (0..3).map(|_| r.random_range(0.0..8.0)).collect();
        let z2: Vec<f64> = (0..3).map(|_| r.random_range(0.0..8.0)).collect();
        let t: f64 = r.random_range(0.01..0.99);
        let mid: Vec<f64> = z1
            .iter()
            .zip(&z2)
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect();
        let g = |z: &[f64]| {
            gamma_aircargo(z, &w, &v, &cw, &cv, &routes, &l)
                .unwrap()
                .penalty
        };
        assert!(g(&mid) <= t * g(&z1) + (1.0 - t) * g(&z2) + 1e-6);
    }
}

#[test]
fn class_duals_match_vertex_enumeration() {
    // the reference: penalty is min over the vertices w in {(4,1), (4,0), (2,3), (0,3), (0,0), ...}
    let z = [4.0, 3.0];
    let l = [2.0, 1.0];
    let mut best = f64::INFINITY;
    for w1 in [0.0, 2.0, 4.0] {
        for w2 in [0.0, 1.0, 3.0] {
            if w1 + w2 <= 5.0 {
                best = best.min(l[0] * (z[0] - w1) + l[1] * (z[1] - w2));
            }
        }
    }
    let r = gamma_passenger(&z, &[5.0], &[vec![1.0, 1.0]], &l).unwrap();
    assert!((r.penalty - best).abs() < 1e-9);
    // dual feasibility: A'v1 + v2 >= l, v >= 0, and the dual objective equals the penalty
    let (v1, v2) = (r.capacity_duals[0], &r.class_duals);
    for i in 0..2 {
        assert!(v1 + v2[i] >= l[i] - 1e-9 && v2[i] >= -1e-12);
    }
    let dual_obj = l[0] * z[0] + l[1] * z[1] - (5.0 * v1 + z[0] * v2[0] + z[1] * v2[1]);
    assert!((dual_obj - r.penalty).abs() < 1e-9);
    assert_eq!(
        v2.iter().map(|v| v.round()).collect::<Vec<_>>(),
        vec![1.0, 0.0]
    );
}

#[test]
fn chain_versus_direct_matches_enumeration() {
    // class 0 flies direct (leg 0) or via legs 1 and 2; class 1 competes for leg 1
    let routes = vec![vec![vec![0], vec![1, 2]], vec![vec![1]]];
    let ones = [1.0, 1.0];
    let cap = [3.0, 4.0, 6.0];
    let z = [6.0, 3.0];
    let l = [5.0, 2.0];
    let r = gamma_aircargo(&z, &ones, &ones, &cap, &cap, &routes, &l).unwrap();
    let mut best = f64::INFINITY;
    for y1 in 0..=6 {
        for y2 in 0..=6 {
            for w2 in 0..=3 {
                let (y1, y2, w2) = (y1 as f64, y2 as f64, w2 as f64);
                let fits = y1 <= cap[0] && y2 + w2 <= cap[1] && y2 <= cap[2] && y1 + y2 <= z[0];
                if fits {
                    best = best.min(l[0] * (z[0] - y1 - y2) + l[1] * (z[1] - w2));
                }
            }
        }
    }
    assert!((r.penalty - best).abs() < 1e-9, "{} vs {best}", r.penalty);
    assert!((r.served[0] - 6.0).abs() < 1e-9 && (r.served[1] - 1.0).abs() < 1e-9);
}
