//! Energy functionals and the Pohozaev quadratic form over computed
//! solutions.
//!
//! All integrals take the radial reduction path: 1D quadrature in the
//! geodesic variable against sinh(s), with the region beyond the stored grid
//! added in closed form from the fitted exponential tail. Truncating instead
//! would swamp the c^{-4}-sized energy deficit this crate measures.

use crate::error::{Error, Result};
use crate::quad;
use crate::solver::RadialSolution;
use std::f64::consts::PI;

/// Energies of a computed solution, with a quadrature error estimate from
/// one grid refinement.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBreakdown {
    /// Dirichlet energy, conformally invariant in 2D.
    pub dirichlet: f64,
    /// Squared L^2 norm against the hyperbolic volume.
    pub l2_hyp: f64,
    /// Moser-Trudinger functional, integral of (e^{u^2} - 1) dV.
    pub mt_functional: f64,
    /// lambda * integral of u^2 e^{u^2} dV.
    pub nonlinear_mass: f64,
    /// Refinement-based error estimate shared by the four quadratures.
    pub quad_error: f64,
}

/// Composite quadrature of g(s, u, u') over the stored solution range.
///
/// Each grid interval gets one 15-point rule on the dense output; the value
/// is recomputed on split intervals and the difference is the error
/// estimate. The interval below the series switch point uses the series
/// evaluation transparently through `RadialSolution::eval`.
pub fn integrate_on_solution<G: Fn(f64, f64, f64) -> f64>(
    sol: &RadialSolution,
    g: &G,
) -> (f64, f64) {
    let f = |s: f64| g(s, sol.eval(s), sol.eval_deriv(s));
    let mut coarse = 0.0;
    let mut fine = 0.0;
    for w in sol.grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (v, _) = quad::gk15(&f, a, b);
        coarse += v;
        let mid = 0.5 * (a + b);
        let (v1, _) = quad::gk15(&f, a, mid);
        let (v2, _) = quad::gk15(&f, mid, b);
        fine += v1 + v2;
    }
    (fine, (fine - coarse).abs())
}

/// Closed-form exponential-tail moment: integral over [s_end, inf) of
/// sinh(s) e^{-k s} ds for k > 1.
fn sinh_tail(s_end: f64, k: f64) -> f64 {
    if k <= 1.0 {
        return f64::INFINITY;
    }
    ((-(k - 1.0) * s_end).exp() / (k - 1.0) - (-(k + 1.0) * s_end).exp() / (k + 1.0)) / 2.0
}

/// Evaluate the four energies of an admissible solution.
///
/// Requires the tail fit (`tail_amplitude`/`tail_rate`) so the truncated
/// range can be completed analytically.
pub fn energies(sol: &RadialSolution) -> Result<EnergyBreakdown> {
    let amp = sol.tail_amplitude.ok_or_else(|| {
        Error::Domain("energies need a tail-fitted solution (tail_amplitude missing)".into())
    })?;
    let rate = sol
        .tail_rate
        .ok_or_else(|| Error::Domain("energies need a tail-fitted solution (tail_rate missing)".into()))?;
    let nu = -rate;
    if !(nu > 0.5) {
        return Err(Error::Domain(format!(
            "tail rate {rate} is not on the fast branch; energies would diverge"
        )));
    }
    let lambda = sol.lambda;
    let s_end = sol.s_end();

    let (dirichlet_grid, e1) = integrate_on_solution(sol, &|s, _u, up| s.sinh() * up * up);
    let (l2_grid, e2) = integrate_on_solution(sol, &|s, u, _up| s.sinh() * u * u);
    let (mass_grid, e3) =
        integrate_on_solution(sol, &|s, u, _up| s.sinh() * u * u * (u * u).exp());
    let (mt_grid, e4) = integrate_on_solution(sol, &|s, u, _up| s.sinh() * (u * u).exp_m1());

    // Tail closed forms with u ~ A e^{-nu s}: u'^2 ~ (A nu)^2 e^{-2 nu s};
    // e^{u^2} is indistinguishable from 1 + u^2 at the truncation scale.
    let t2 = sinh_tail(s_end, 2.0 * nu);
    let dirichlet = 2.0 * PI * (dirichlet_grid + (amp * nu).powi(2) * t2);
    let l2_hyp = 2.0 * PI * (l2_grid + amp * amp * t2);
    let nonlinear_mass = lambda * 2.0 * PI * (mass_grid + amp * amp * t2);
    let mt_functional = 2.0 * PI * (mt_grid + amp * amp * t2);

    Ok(EnergyBreakdown {
        dirichlet,
        l2_hyp,
        mt_functional,
        nonlinear_mass,
        quad_error: 2.0 * PI * e1.max(e2).max(lambda * e3).max(e4),
    })
}

/// The boundary quadratic form for radial test functions:
/// P(d, u, v) = -2 pi d^2 u'(d) v'(d), where the primes are Euclidean radial
/// derivatives. Both surface terms of the general definition collapse since
/// the gradient of a radial function is parallel to the outward normal.
pub fn quadratic_form_p<F, G>(d: f64, du: &F, dv: &G) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain(format!("test circle radius {d} outside (0,1)")));
    }
    Ok(-2.0 * PI * d * d * du(d) * dv(d))
}

/// Direct n-point circle quadrature of the defining surface integrals of P;
/// cross-checks the radial reduction.
pub fn quadratic_form_p_circle<F, G>(d: f64, du: &F, dv: &G, n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain(format!("test circle radius {d} outside (0,1)")));
    }
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..n {
        let theta = std::f64::consts::TAU * i as f64 / n as f64;
        let normal = [theta.cos(), theta.sin()];
        let grad_u = [du(d) * normal[0], du(d) * normal[1]];
        let grad_v = [dv(d) * normal[0], dv(d) * normal[1]];
        let un = grad_u[0] * normal[0] + grad_u[1] * normal[1];
        let vn = grad_v[0] * normal[0] + grad_v[1] * normal[1];
        first += un * vn;
        second += grad_u[0] * grad_v[0] + grad_u[1] * grad_v[1];
    }
    let ds = std::f64::consts::TAU * d / n as f64;
    Ok(-2.0 * d * first * ds + d * second * ds)
}

/// Both sides of the Pohozaev identity on the circle of Euclidean radius d.
#[derive(Debug, Clone, Copy)]
pub struct PohozaevReport {
    pub d: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl PohozaevReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.lhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Euclidean radial derivative of the solution at Euclidean radius rho.
fn euclidean_deriv(sol: &RadialSolution, rho: f64) -> f64 {
    let s = 2.0 * rho.atanh();
    sol.eval_deriv(s) * 2.0 / (1.0 - rho * rho)
}

/// Evaluate the Pohozaev identity
/// P(d,u,u) = 4 d lambda I_bdry - 8 lambda I_vol,
/// I_bdry = surface integral of e^{u^2}/(1-|x|^2)^2,
/// I_vol  = volume integral of e^{u^2} (1+|x|^2)/(1-|x|^2)^3,
/// by radial quadrature over the computed solution.
pub fn pohozaev_residual(sol: &RadialSolution, d: f64) -> Result<PohozaevReport> {
    let rho_end = (sol.s_end() / 2.0).tanh();
    if !(d > 0.0 && d < rho_end) {
        return Err(Error::Range(format!(
            "test radius {d} outside grid coverage (0, {rho_end:.6})"
        )));
    }
    let s_d = 2.0 * d.atanh();
    let u_d = sol.eval(s_d);
    let lambda = sol.lambda;

    let lhs = {
        let dud = euclidean_deriv(sol, d);
        -2.0 * PI * d * d * dud * dud
    };

    // boundary term: 4 d lambda * (2 pi d) e^{u(d)^2}/(1-d^2)^2
    let bdry = 8.0 * PI * lambda * d * d * (u_d * u_d).exp() / (1.0 - d * d).powi(2);

    // volume term in the geodesic variable: rho = tanh(s/2),
    // dx = 2 pi rho drho, drho/ds = (1 - rho^2)/2.
    let integrand = |s: f64, u: f64, _up: f64| {
        let rho = (0.5 * s).tanh();
        let rho2 = rho * rho;
        (u * u).exp() * (1.0 + rho2) / (1.0 - rho2).powi(3) * rho * (1.0 - rho2) / 2.0
    };
    let f = |s: f64| integrand(s, sol.eval(s), 0.0);
    let mut vol = 0.0;
    for w in sol.grid.windows(2) {
        let (a, b) = (w[0], w[1].min(s_d));
        if a >= s_d {
            break;
        }
        let mid = 0.5 * (a + b);
        let (v1, _) = quad::gk15(&f, a, mid);
        let (v2, _) = quad::gk15(&f, mid, b);
        vol += v1 + v2;
    }
    let rhs = bdry - 16.0 * PI * lambda * vol;

    Ok(PohozaevReport {
        d,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}
