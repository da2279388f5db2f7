//! Deeper profile pipeline checks: the second-correction ODE grid, the flat
//! variable, and windowing behavior of the far-field fits.

use hypermt::lab;
use hypermt::profiles::{
    self, farfield_slope, phi0, psi0, psi0_prime, representation_solve, solve_z0,
    solve_z0_profile, z0_flux_residual, ProfileKind, Z0_TAIL_SLOPE,
};
use hypermt::Error;

#[test]
fn z0_grid_contract() {
    let grid = solve_z0(200.0, 1e-10).unwrap();
    assert_eq!(grid.kind, ProfileKind::Z0);
    assert_eq!(grid.radii[0], 0.0);
    assert_eq!(grid.values[0], 0.0);
    assert_eq!(grid.derivs[0], 0.0);
    assert!(grid.radii.windows(2).all(|w| w[0] < w[1]));
    assert!(grid.r_max() >= 200.0 * (1.0 - 1e-12));
}

#[test]
fn z0_small_radius_preconditions() {
    assert!(solve_z0(50.0, 1e-10).is_err());
    assert!(solve_z0(200.0, 0.0).is_err());
}

#[test]
fn z0_far_field_slope_windows() {
    let z0 = solve_z0_profile(1.2e6, 1e-11).unwrap();
    let grid = z0.to_grid();
    // the late window realizes the closed-form slope within 1e-3
    let far = farfield_slope(&grid, (1e4, 1e6)).unwrap();
    assert!(
        (far.slope - Z0_TAIL_SLOPE).abs() < 1e-3,
        "slope {} vs {Z0_TAIL_SLOPE}",
        far.slope
    );
    // recorded golden: on (1e2, 1e4) the O(1) term of the asymptote biases
    // the two-parameter fit by about +0.097, far above 1e-3
    let near = farfield_slope(&grid, (1e2, 1e4)).unwrap();
    let bias = near.slope - Z0_TAIL_SLOPE;
    assert!(
        bias > 0.05 && bias < 0.15,
        "recorded window bias drifted: {bias}"
    );
}

#[test]
fn w0_far_field_slope_windows() {
    let mut radii = Vec::new();
    let mut vals = Vec::new();
    let mut ders = Vec::new();
    for i in 0..500 {
        let r = 10.0f64 * (1.2e5f64 / 10.0).powf(i as f64 / 499.0);
        radii.push(r);
        vals.push(profiles::w0(r).unwrap());
        ders.push(profiles::w0_prime(r).unwrap());
    }
    let grid = profiles::ProfileGrid::new(radii, vals, ders, ProfileKind::W0).unwrap();
    let late = farfield_slope(&grid, (1e3, 1e5)).unwrap();
    assert!((late.slope + 2.0).abs() < 1e-3, "slope {}", late.slope);
    // recorded golden: the early window misses 1e-3 by ~30%
    let near = farfield_slope(&grid, (1e2, 1e4)).unwrap();
    assert!(
        (near.slope + 2.0).abs() < 2e-3,
        "early-window slope drifted: {}",
        near.slope
    );
}

#[test]
fn z0_flux_residual_tracks_tolerance() {
    for tol in [1e-9, 1e-11] {
        let z0 = solve_z0_profile(200.0, tol).unwrap();
        for &r in &[1.0, 5.0, 50.0] {
            let resid = z0_flux_residual(&z0, r).unwrap().abs();
            assert!(
                resid < 10.0 * tol,
                "tol {tol:e}: flux residual {resid:e} at r = {r}"
            );
        }
    }
}

#[test]
fn z0_fd_laplacian_oracle_envelope() {
    // The finite-difference Laplacian of the dense-output grid is floored by
    // the C^1 interpolation order (~1e-3 here), independent of the ODE
    // tolerance; the flux residual above is the tolerance-tracking check.
    let z0 = solve_z0_profile(200.0, 1e-11).unwrap();
    let mut worst = 0.0f64;
    for &r in &[1.0, 5.0, 50.0] {
        let lap = lab::fd_laplacian(&|x| z0.eval(x).unwrap(), r, 0.05);
        let rhs = -4.0 / (1.0 + r * r).powi(2)
            * (profiles::z0_source(r).unwrap() + 2.0 * z0.eval(r).unwrap());
        worst = worst.max((lap - rhs).abs());
    }
    assert!(worst < 5e-3, "FD residual envelope drifted: {worst:e}");
}

#[test]
fn psi0_far_field_slope() {
    let z0 = solve_z0_profile(3.3e6, 1e-11).unwrap();
    let d = psi0_prime(&z0, 30.0).unwrap();
    assert!(
        (d - Z0_TAIL_SLOPE / 2.0).abs() < 0.2,
        "psi0'(30) = {d} vs {}",
        Z0_TAIL_SLOPE / 2.0
    );
    // the measured value is actually tight
    assert!((d - Z0_TAIL_SLOPE / 2.0).abs() < 1e-4, "psi0'(30) = {d}");
}

#[test]
fn psi0_identity_with_z0() {
    let z0 = solve_z0_profile(200.0, 1e-11).unwrap();
    for &t in &[0.0f64, 0.5, 2.0, 6.0] {
        let r = t.exp_m1().sqrt();
        let a = psi0(&z0, t).unwrap();
        let b = z0.eval(r).unwrap();
        assert_eq!(a, b);
    }
    assert_eq!(psi0(&z0, 0.0).unwrap(), 0.0);
    assert_eq!(phi0(0.0).unwrap(), 0.0);
}

#[test]
fn psi0_refuses_beyond_grid() {
    let z0 = solve_z0_profile(150.0, 1e-10).unwrap();
    // t = 11 needs r ~ e^{5.5} ~ 245 > 150
    let err = psi0(&z0, 11.0).unwrap_err();
    match err {
        Error::Range(msg) => assert!(msg.contains("r_max"), "{msg}"),
        other => panic!("expected range error, got {other:?}"),
    }
}

#[test]
fn representation_reproduces_psi0() {
    let z0 = solve_z0_profile(200.0, 1e-11).unwrap();
    let source = |s: f64| {
        let p = phi0(s).unwrap();
        -p - 2.0 * p * p + 4.0 * s * p - 2.0 * s * s * p + s.powi(3) - 0.5 * s.powi(4)
    };
    for i in 1..=8 {
        let t = i as f64;
        let via_kernel = representation_solve(&source, t).unwrap();
        let direct = psi0(&z0, t).unwrap();
        assert!(
            (via_kernel - direct).abs() < 1e-5,
            "t = {t}: {via_kernel} vs {direct}"
        );
    }
}

#[test]
fn phi0_bound_and_limit() {
    // |phi0(t) + t| is bounded; the limit value is 2 + pi^2/6
    let c_inf = 2.0 + std::f64::consts::PI.powi(2) / 6.0;
    let v = phi0(30.0).unwrap();
    assert!((v + 30.0).abs() < 5.0);
    assert!(((v + 30.0) - c_inf).abs() < 1e-5, "phi0(30)+30 = {}", v + 30.0);
}

#[test]
fn farfield_fit_rejects_bad_windows() {
    let grid = solve_z0(200.0, 1e-10).unwrap();
    assert!(farfield_slope(&grid, (5.0, 100.0)).is_err()); // r_lo < 10
    assert!(farfield_slope(&grid, (50.0, 20.0)).is_err()); // inverted
    assert!(farfield_slope(&grid, (50.0, 1e5)).is_err()); // beyond grid
}
