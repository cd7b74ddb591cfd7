use hcopt_nrm::{gamma_passenger, round_limits};
use proptest::prelude::*;

const A: [[f64; 3]; 2] = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];

fn consumption() -> Vec<Vec<f64>> {
    A.iter().map(|r| r.to_vec()).collect()
}

proptest! {
    #[test]
    fn penalty_is_bounded_by_rejecting_everyone(
        z in proptest::collection::vec(0.0f64..20.0, 3),
        c in proptest::collection::vec(0.0f64..20.0, 2),
        l in proptest::collection::vec(0.1f64..10.0, 3),
    ) {
        let g = gamma_passenger(&z, &c, &consumption(), &l).unwrap();
        let all: f64 = l.iter().zip(&z).map(|(l, z)| l * z).sum();
        prop_assert!(g.penalty >= -1e-9 && g.penalty <= all + 1e-9);
        prop_assert!(g.served.iter().zip(&z).all(|(w, z)| *w >= -1e-9 && *w <= z + 1e-9));
    }

    #[test]
    fn more_capacity_never_costs_more(
        z in proptest::collection::vec(0.0f64..20.0, 3),
        c in proptest::collection::vec(0.0f64..20.0, 2),
        extra in proptest::collection::vec(0.0f64..5.0, 2),
        l in proptest::collection::vec(0.1f64..10.0, 3),
    ) {
        let bigger: Vec<f64> = c.iter().zip(&extra).map(|(a, b)| a + b).collect();
        let small = gamma_passenger(&z, &c, &consumption(), &l).unwrap().penalty;
        let large = gamma_passenger(&z, &bigger, &consumption(), &l).unwrap().penalty;
        prop_assert!(large <= small + 1e-9);
    }

    #[test]
    fn penalty_gradient_lies_between_zero_and_unit_penalty(
        z in proptest::collection::vec(0.0f64..20.0, 3),
        c in proptest::collection::vec(0.0f64..20.0, 2),
        l in proptest::collection::vec(0.1f64..10.0, 3),
    ) {
        // d gamma / d z_i = l_i - v2_i must sit in [0, l_i]
        let g = gamma_passenger(&z, &c, &consumption(), &l).unwrap();
        for (li, v) in l.iter().zip(&g.class_duals) {
            let slope = li - v;
            prop_assert!(slope >= -1e-7 && slope <= li + 1e-7, "slope {slope} outside [0, {li}]");
        }
    }

    #[test]
    fn rounded_limits_are_nonnegative_integers(x in proptest::collection::vec(-5.0f64..50.0, 1..6)) {
        let r = round_limits(&x);
        prop_assert!(r.iter().zip(&x).all(|(r, x)| *r >= 0.0 && r.fract() == 0.0 && (r - x.max(0.0)).abs() <= 0.5));
    }
}
