//! Property-based checks of the disk primitives and the decay classifier.

use hypermt::geometry::{
    euclidean_radius, geodesic_radius, hyperbolic_distance, metric_weights, mobius, DiskPoint,
};
use hypermt::solver::{classify_decay, RadialSolution, ShotOutcome};
use proptest::prelude::*;

fn disk_point(max_r: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..max_r, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th)| DiskPoint::new(r * th.cos(), r * th.sin()).unwrap())
}

proptest! {
    #[test]
    fn mobius_is_an_involution(a in disk_point(0.95), x in disk_point(0.95)) {
        let y = mobius(a, mobius(a, x));
        prop_assert!((y.x1 - x.x1).abs() < 1e-12);
        prop_assert!((y.x2 - x.x2).abs() < 1e-12);
    }

    #[test]
    fn mobius_is_an_isometry(a in disk_point(0.9), x in disk_point(0.9), y in disk_point(0.9)) {
        let d0 = hyperbolic_distance(x, y).unwrap().0;
        let d1 = hyperbolic_distance(mobius(a, x), mobius(a, y)).unwrap().0;
        prop_assert!((d0 - d1).abs() < 1e-10, "{d0} vs {d1}");
    }

    #[test]
    fn mobius_swaps_center_and_origin(a in disk_point(0.95)) {
        let to_origin = mobius(a, a);
        prop_assert!(to_origin.norm() < 1e-12);
        let to_a = mobius(a, DiskPoint::origin());
        prop_assert!((to_a.x1 - a.x1).abs() < 1e-14);
        prop_assert!((to_a.x2 - a.x2).abs() < 1e-14);
    }

    #[test]
    fn radii_round_trip(r in 0.0..0.99999f64) {
        let s = geodesic_radius(r).unwrap();
        let back = euclidean_radius(s).unwrap();
        prop_assert!((back - r).abs() < 1e-12);
    }

    #[test]
    fn volume_weight_matches_sinh(r in 1e-6..0.999f64) {
        let s = geodesic_radius(r).unwrap().0;
        let (_, w) = metric_weights(r).unwrap();
        prop_assert!((s.sinh() - w).abs() <= 1e-12 * (1.0 + w));
    }

    #[test]
    fn distance_is_symmetric(x in disk_point(0.95), y in disk_point(0.95)) {
        let dxy = hyperbolic_distance(x, y).unwrap().0;
        let dyx = hyperbolic_distance(y, x).unwrap().0;
        prop_assert!((dxy - dyx).abs() < 1e-12);
        prop_assert!(dxy >= 0.0);
    }

    #[test]
    fn classifier_separates_synthetic_rates(
        lambda in 0.01..0.24f64,
        amp in 0.1..10.0f64,
        fast_side in proptest::bool::ANY,
    ) {
        // u = A e^{rate s} with rate at either linearized branch must be
        // classified onto that branch for every admissible lambda
        let root = (1.0 - 4.0 * lambda).sqrt();
        let rate = if fast_side { -(1.0 + root) / 2.0 } else { -(1.0 - root) / 2.0 };
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.5).collect();
        let u: Vec<f64> = grid.iter().map(|s| amp * (rate * s).exp()).collect();
        let mut u_prime: Vec<f64> = grid.iter().map(|s| amp * rate * (rate * s).exp()).collect();
        u_prime[0] = 0.0; // synthetic constructor wants u'(0) = 0
        let sol = RadialSolution::from_samples(lambda, amp, grid, u, u_prime).unwrap();
        let outcome = classify_decay(&sol, lambda, (50.0, 99.0)).unwrap();
        match outcome {
            ShotOutcome::FastDecay { rate: m, .. } => {
                prop_assert!(fast_side, "slow branch misclassified as fast (m = {m})");
                prop_assert!((m - rate).abs() < 1e-9);
            }
            ShotOutcome::SlowDecay { rate: m } => {
                prop_assert!(!fast_side, "fast branch misclassified as slow (m = {m})");
                prop_assert!((m - rate).abs() < 1e-9);
            }
            other => prop_assert!(false, "unexpected outcome {other:?}"),
        }
    }
}
