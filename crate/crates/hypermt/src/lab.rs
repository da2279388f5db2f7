//! The verification suite: lambda-continuation sweeps, asymptotic checks on
//! computed solutions, and the aggregated pass/fail report behind the
//! `verify` command.
//!
//! Every check row names the identity or independent oracle it tests, so no
//! tolerance in the report is anonymous. Checks with only existence-grade
//! constants behind them are phrased as trends or recorded golden envelopes.

use crate::error::{Error, Result};
use crate::fmt;
use crate::functionals::{self};
use crate::profiles::{self, Z0Profile};
use crate::solver::{self, RadialSolution, ShootingConfig};
use serde::Serialize;
use std::f64::consts::PI;

pub const FOUR_PI: f64 = 4.0 * PI;

/// Default Euclidean radius for far-field probes.
pub const DEFAULT_DELTA: f64 = 0.3;

/// Default Euclidean radius for the Pohozaev residual column.
pub const DEFAULT_POHOZAEV_D: f64 = 0.1;

/// One row of the lambda-continuation.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub c_lambda: f64,
    pub r_lambda: f64,
    pub dirichlet: f64,
    pub mt_functional: f64,
    pub lambda_c2: f64,
    pub deficit_ratio: f64,
    pub decay_rate: f64,
    pub pohozaev_residual: f64,
    pub a1_estimate: f64,
    pub status: String,
}

impl SweepRecord {
    fn failed(lambda: f64, reason: String) -> Self {
        SweepRecord {
            lambda,
            c_lambda: f64::NAN,
            r_lambda: f64::NAN,
            dirichlet: f64::NAN,
            mt_functional: f64::NAN,
            lambda_c2: f64::NAN,
            deficit_ratio: f64::NAN,
            decay_rate: f64::NAN,
            pohozaev_residual: f64::NAN,
            a1_estimate: f64::NAN,
            status: reason,
        }
    }

    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    /// CSV header, stable schema.
    pub const CSV_HEADER: &'static str = "lambda,c_lambda,r_lambda,dirichlet,mt_functional,lambda_c2,deficit_ratio,decay_rate,pohozaev_residual,a1_estimate,status";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt::real(self.lambda),
            fmt::real(self.c_lambda),
            fmt::real(self.r_lambda),
            fmt::real(self.dirichlet),
            fmt::real(self.mt_functional),
            fmt::real(self.lambda_c2),
            fmt::real(self.deficit_ratio),
            fmt::real(self.decay_rate),
            fmt::real(self.pohozaev_residual),
            fmt::real(self.a1_estimate),
            self.status
        )
    }
}

/// Solve one lambda and assemble its record; failures become NaN rows.
pub fn sweep_row(lambda: f64, config: &ShootingConfig) -> SweepRecord {
    match sweep_row_inner(lambda, config) {
        Ok(rec) => rec,
        Err(e) => SweepRecord::failed(lambda, format!("{e}")),
    }
}

fn sweep_row_inner(lambda: f64, config: &ShootingConfig) -> Result<SweepRecord> {
    let sol = solver::solve_for_lambda(lambda, config)?;
    let en = functionals::energies(&sol)?;
    let poh = functionals::pohozaev_residual(&sol, DEFAULT_POHOZAEV_D)?;
    // The far-field estimate requires the probe radius to clear the bubble
    // by three decades; at large lambda no admissible radius exists and the
    // column records NaN.
    let a1 = green_report(&sol, DEFAULT_DELTA)
        .map(|g| g.a1_estimate)
        .unwrap_or(f64::NAN);
    let c = sol.c;
    Ok(SweepRecord {
        lambda: sol.lambda,
        c_lambda: c,
        r_lambda: sol.r_lambda,
        dirichlet: en.dirichlet,
        mt_functional: en.mt_functional,
        lambda_c2: sol.lambda * c * c,
        deficit_ratio: (en.dirichlet - FOUR_PI) * c.powi(4) / FOUR_PI,
        decay_rate: sol.tail_rate.unwrap_or(f64::NAN),
        pohozaev_residual: poh.relative_residual(),
        a1_estimate: a1,
        status: "ok".into(),
    })
}

/// Run the continuation over a sorted lambda grid. Rows are computed
/// concurrently (capped by `threads`, 0 or None meaning the rayon default)
/// and aggregated in input order, so the output is identical to a serial
/// run.
pub fn run_sweep(
    lambda_grid: &[f64],
    config: &ShootingConfig,
    threads: Option<usize>,
) -> Result<Vec<SweepRecord>> {
    for w in lambda_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain("lambda grid must be strictly increasing".into()));
        }
    }
    if let Some(&bad) = lambda_grid
        .iter()
        .find(|l| !(**l > 0.0 && **l < 0.25))
    {
        return Err(Error::Domain(format!(
            "lambda grid value {bad} outside (0, 1/4)"
        )));
    }
    let compute = |lams: &[f64]| -> Vec<SweepRecord> {
        use rayon::prelude::*;
        lams.par_iter().map(|l| sweep_row(*l, config)).collect()
    };
    let records = match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?
            .install(|| compute(lambda_grid)),
        _ => compute(lambda_grid),
    };
    Ok(records)
}

/// Far-field probe: lead = c u(delta) + 2 ln(delta) (which should vanish as
/// lambda -> 0) and the raw next-order estimate A1 = c^2 * lead.
#[derive(Debug, Clone, Copy)]
pub struct GreenReport {
    pub delta: f64,
    pub lead: f64,
    pub a1_estimate: f64,
}

pub fn green_report(sol: &RadialSolution, delta: f64) -> Result<GreenReport> {
    let lower = sol.r_lambda * 1e3;
    if !(delta > lower && delta < 0.9) {
        return Err(Error::Domain(format!(
            "far-field probe delta = {delta} must sit in ({lower:.3e}, 0.9), outside the bubble"
        )));
    }
    let s = 2.0 * delta.atanh();
    if s > sol.s_end() {
        return Err(Error::Range(format!(
            "delta = {delta} is beyond the stored grid (s = {s:.3} > {:.3})",
            sol.s_end()
        )));
    }
    let c = sol.c;
    let lead = c * sol.eval(s) + 2.0 * delta.ln();
    Ok(GreenReport {
        delta,
        lead,
        a1_estimate: c * c * lead,
    })
}

/// Which truncation of the inner expansion is being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExpansionOrder {
    /// c - tau/c
    First,
    /// + phi0(tau)/c^3
    Second,
    /// + beta tau/(2 c^5)
    Third,
}

/// c^5-scaled sup of the inner-expansion residual over the admissible window.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionResidual {
    pub window: (f64, f64),
    pub max_scaled_residual: f64,
    pub order: ExpansionOrder,
}

/// Resample the solution onto the inner variable tau = ln(1 + rho^2/r_lambda^2)
/// and measure the residual against the truncated expansion.
pub fn inner_expansion_residual(
    sol: &RadialSolution,
    order: ExpansionOrder,
) -> Result<ExpansionResidual> {
    let c = sol.c;
    let r_lambda = sol.r_lambda;
    let delta = DEFAULT_DELTA;
    let tau_geom = (delta * delta / (r_lambda * r_lambda)).ln_1p();
    let tau_max = (c * c - c).min(tau_geom);
    if !(tau_max > 1.0) {
        return Err(Error::Range(format!(
            "inner window empty: c = {c} is too small (tau_max = {tau_max:.3})"
        )));
    }
    let beta = profiles::Z0_TAIL_SLOPE;
    let n = 400;
    let mut max_resid: f64 = 0.0;
    for i in 0..=n {
        let tau = tau_max * i as f64 / n as f64;
        let rho = r_lambda * tau.exp_m1().sqrt();
        let s = 2.0 * rho.atanh();
        let u = sol.eval(s);
        let mut model = c - tau / c;
        if order != ExpansionOrder::First {
            model += profiles::phi0(tau)? / c.powi(3);
        }
        if order == ExpansionOrder::Third {
            model += beta * tau / (2.0 * c.powi(5));
        }
        max_resid = max_resid.max((u - model).abs());
    }
    Ok(ExpansionResidual {
        window: (0.0, tau_max),
        max_scaled_residual: max_resid * c.powi(5),
        order,
    })
}

/// Pointwise bound report: the minimal slack of an inequality over a range.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub min_slack: f64,
    pub n_points: usize,
    pub holds: bool,
}

/// First radius where w0 = -1; the bound checks start at this multiple of
/// the blow-up scale.
pub fn w0_minus_one_root() -> Result<f64> {
    let f = |r: f64| profiles::w0(r).map(|v| v + 1.0);
    let mut lo = 1.0;
    let mut hi = 10.0;
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::Numerical(format!(
            "w0 + 1 does not bracket a root on [1, 10] ({flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Peak-anchored upper bound u <= c - ln(1 + rho^2/r_lambda^2)/c on
/// [r0 * r_lambda, grid end).
pub fn check_monotone_bound(sol: &RadialSolution, r0: f64) -> BoundReport {
    check_monotone_bound_window(sol, r0, f64::INFINITY)
}

/// Same bound restricted to rho/r_lambda in [x_lo, x_hi); used to probe
/// where the matched-radius restriction genuinely matters.
pub fn check_monotone_bound_window(sol: &RadialSolution, x_lo: f64, x_hi: f64) -> BoundReport {
    let c = sol.c;
    let r_lambda = sol.r_lambda;
    let mut min_slack = f64::INFINITY;
    let mut n = 0;
    for (i, &s) in sol.grid.iter().enumerate() {
        let rho = (0.5 * s).tanh();
        if rho < x_lo * r_lambda || rho >= (x_hi * r_lambda).min(1.0) {
            continue;
        }
        let bound = c - (rho * rho / (r_lambda * r_lambda)).ln_1p() / c;
        let slack = bound - sol.u[i];
        min_slack = min_slack.min(slack);
        n += 1;
    }
    BoundReport {
        min_slack,
        n_points: n,
        holds: n > 0 && min_slack >= 0.0,
    }
}

/// Density bound rho^2 lambda u^2 e^{u^2} <= 4 / ln^2(1 + rho^2/r_lambda^2)
/// on [r0 * r_lambda, grid end); the shared conformal factor cancels.
pub fn check_density_bound(sol: &RadialSolution, r0: f64) -> BoundReport {
    let r_lambda = sol.r_lambda;
    let lambda = sol.lambda;
    let mut min_slack = f64::INFINITY;
    let mut n = 0;
    for (i, &s) in sol.grid.iter().enumerate() {
        let rho = (0.5 * s).tanh();
        if rho < r0 * r_lambda || rho >= 1.0 {
            continue;
        }
        let u = sol.u[i];
        let lhs = rho * rho * lambda * u * u * (u * u).exp();
        let log_term = (rho * rho / (r_lambda * r_lambda)).ln_1p();
        let rhs = 4.0 / (log_term * log_term);
        min_slack = min_slack.min(rhs - lhs);
        n += 1;
    }
    BoundReport {
        min_slack,
        n_points: n,
        holds: n > 0 && min_slack >= 0.0,
    }
}

/// Deficit sequence and its extrapolation in 1/c^2.
#[derive(Debug, Clone)]
pub struct DeficitSummary {
    pub ratios: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub last: f64,
}

/// Richardson-extrapolate deficit_ratio -> limit using the two largest-c
/// rows; the plain last value is reported alongside.
pub fn check_energy_deficit(records: &[SweepRecord]) -> Result<DeficitSummary> {
    let rows: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.ok() && r.lambda <= 0.05)
        .collect();
    if rows.len() < 3 {
        return Err(Error::Domain(format!(
            "deficit extrapolation needs >= 3 successful rows with lambda <= 0.05, have {}",
            rows.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (1.0 / (r.c_lambda * r.c_lambda), r.deficit_ratio))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (x0, d0) = pts[0];
    let (x1, d1) = pts[1];
    let extrapolated = (d0 * x1 - d1 * x0) / (x1 - x0);
    Ok(DeficitSummary {
        ratios: rows.iter().map(|r| (r.lambda, r.deficit_ratio)).collect(),
        extrapolated,
        last: d0,
    })
}

/// Linear fit lambda c^2 = intercept + slope * lambda over successful rows.
#[derive(Debug, Clone, Copy)]
pub struct LambdaCFit {
    pub a_estimate: f64,
    pub intercept: f64,
    pub max_linearity_residual: f64,
}

pub fn check_lambda_c_relation(records: &[SweepRecord]) -> Result<LambdaCFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.ok())
        .map(|r| (r.lambda, r.lambda_c2))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Domain(format!(
            "lambda-c fit needs >= 3 rows, have {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy * sxx - sx * sxy) / det;
    let max_resid = pts
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(LambdaCFit {
        a_estimate: slope,
        intercept,
        max_linearity_residual: max_resid,
    })
}

/// Sup-norm distances between the rescaled solution and the profile ladder
/// over the bubble ball |x| <= 10.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    /// sup |eta_lambda - eta0|
    pub first: f64,
    /// sup |c^2 (eta_lambda - eta0) - w0|
    pub second: f64,
    /// sup |c^2 (c^2 (eta_lambda - eta0) - w0) - z0|
    pub third: f64,
}

pub fn check_profile_convergence(sol: &RadialSolution, z0: &Z0Profile) -> Result<ConvergenceReport> {
    let c = sol.c;
    let r_lambda = sol.r_lambda;
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    let mut third: f64 = 0.0;
    let n = 400;
    for i in 1..=n {
        let x = 10.0 * i as f64 / n as f64;
        let rho = r_lambda * x;
        let s = 2.0 * rho.atanh();
        let eta_lam = c * (sol.eval(s) - c);
        let e0 = profiles::eta0(x);
        let w = profiles::w0(x)?;
        let z = z0.eval(x)?;
        let d1 = eta_lam - e0;
        let d2 = c * c * d1 - w;
        let d3 = c * c * d2 - z;
        first = first.max(d1.abs());
        second = second.max(d2.abs());
        third = third.max(d3.abs());
    }
    Ok(ConvergenceReport {
        first,
        second,
        third,
    })
}

/// Two-sided exponential envelopes for u and -u' on [T, grid end].
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeReport {
    pub t_anchor: f64,
    pub rate_lower: f64,
    pub rate_upper: f64,
    pub u_lower_margin: f64,
    pub u_upper_margin: f64,
    pub du_lower_margin: f64,
    pub du_upper_margin: f64,
    pub holds: bool,
}

/// Smallest anchor T with 4 lambda B_T < 1 for the given energy bound.
pub fn min_envelope_anchor(lambda: f64, m0: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 0.25) {
        return Err(Error::Domain(format!("envelope needs lambda in (0, 1/4), got {lambda}")));
    }
    let l = (1.0 / (4.0 * lambda)).ln();
    Ok((1.0 + (2.0 * m0 / PI) / l).acosh())
}

/// Verify the decay sandwich with explicit constants:
/// A_T = coth(T), B_T = exp((4 M0/pi)/(e^T + e^{-T} - 2)),
/// rate_lower = -(A_T + sqrt(A_T^2 - 4 lambda))/2 (lower envelope),
/// rate_upper = -(1 + sqrt(1 - 4 lambda B_T))/2 (upper envelope),
/// C1 = u(T) e^{-rate_lower T}, C2 = u(T) e^{-rate_upper T},
/// and for -u': C1~ = -rate_upper C1-side, C2~ = -rate_lower C2-side.
/// Margins are relative to u (resp. -u').
pub fn decay_envelope(sol: &RadialSolution, t_anchor: f64, m0: f64) -> Result<EnvelopeReport> {
    let lambda = sol.lambda;
    let a_t = 1.0 / t_anchor.tanh();
    let b_t = ((4.0 * m0 / PI) / (t_anchor.exp() + (-t_anchor).exp() - 2.0)).exp();
    if 4.0 * lambda * b_t >= 1.0 {
        let t_min = min_envelope_anchor(lambda, m0)?;
        return Err(Error::Domain(format!(
            "4 lambda B_T = {:.4} >= 1 at T = {t_anchor}; choose T > {t_min:.3}",
            4.0 * lambda * b_t
        )));
    }
    if t_anchor >= sol.s_end() {
        return Err(Error::Range(format!(
            "anchor T = {t_anchor} beyond grid end {:.3}",
            sol.s_end()
        )));
    }
    let mu_minus = -(a_t + (a_t * a_t - 4.0 * lambda).sqrt()) / 2.0;
    let nu_minus = -(1.0 + (1.0 - 4.0 * lambda * b_t).sqrt()) / 2.0;
    let u_t = sol.eval(t_anchor);
    let c1 = u_t * (-mu_minus * t_anchor).exp();
    let c2 = u_t * (-nu_minus * t_anchor).exp();
    let c1_tilde = -nu_minus * c1;
    let c2_tilde = -mu_minus * c2;

    let mut u_lo = f64::INFINITY;
    let mut u_hi = f64::INFINITY;
    let mut du_lo = f64::INFINITY;
    let mut du_hi = f64::INFINITY;
    for (i, &s) in sol.grid.iter().enumerate() {
        if s < t_anchor {
            continue;
        }
        let u = sol.u[i];
        let mdu = -sol.u_prime[i];
        let lower = c1 * (mu_minus * s).exp();
        let upper = c2 * (nu_minus * s).exp();
        u_lo = u_lo.min((u - lower) / u.abs().max(f64::MIN_POSITIVE));
        u_hi = u_hi.min((upper - u) / u.abs().max(f64::MIN_POSITIVE));
        let dlower = c1_tilde * (mu_minus * s).exp();
        let dupper = c2_tilde * (nu_minus * s).exp();
        du_lo = du_lo.min((mdu - dlower) / mdu.abs().max(f64::MIN_POSITIVE));
        du_hi = du_hi.min((dupper - mdu) / mdu.abs().max(f64::MIN_POSITIVE));
    }
    let holds = u_lo >= 0.0 && u_hi >= 0.0 && du_lo >= 0.0 && du_hi >= 0.0;
    Ok(EnvelopeReport {
        t_anchor,
        rate_lower: mu_minus,
        rate_upper: nu_minus,
        u_lower_margin: u_lo,
        u_upper_margin: u_hi,
        du_lower_margin: du_lo,
        du_upper_margin: du_hi,
        holds,
    })
}

/// One probed point of the injectivity scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub c: f64,
    pub lambda_star: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    pub strictly_decreasing: bool,
    /// The largest sampled lambda* below which the continuation is injective
    /// on the sampled grid.
    pub lambda0: f64,
}

/// Probe injectivity of c -> lambda*(c) over a sorted grid of peak heights.
pub fn uniqueness_scan(c_grid: &[f64], config: &ShootingConfig) -> Result<ScanReport> {
    if c_grid.is_empty() {
        return Err(Error::Domain("empty c grid".into()));
    }
    for w in c_grid.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Domain(format!("duplicate c entry {}", w[0])));
        }
        if w[0] > w[1] {
            return Err(Error::Domain("c grid must be sorted ascending".into()));
        }
    }
    if c_grid[0] < 1.0 {
        return Err(Error::Domain("c grid values must be >= 1".into()));
    }
    let mut points = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        match solver::lambda_star(c, config) {
            Ok(l) => points.push(ScanPoint {
                c,
                lambda_star: Some(l),
                status: "ok".into(),
            }),
            Err(e) => points.push(ScanPoint {
                c,
                lambda_star: None,
                status: format!("{e}"),
            }),
        }
    }
    let stars: Vec<f64> = points.iter().filter_map(|p| p.lambda_star).collect();
    let strictly_decreasing = stars.windows(2).all(|w| w[0] > w[1]);
    let lambda0 = if strictly_decreasing {
        stars.first().copied().unwrap_or(f64::NAN)
    } else {
        // report the first monotonicity break
        stars
            .windows(2)
            .find(|w| w[0] <= w[1])
            .map(|w| w[0])
            .unwrap_or(f64::NAN)
    };
    Ok(ScanReport {
        points,
        strictly_decreasing,
        lambda0,
    })
}

// ---------------------------------------------------------------------------
// verification report
// ---------------------------------------------------------------------------

/// A single named check with explicit tolerance and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: String,
}

impl Check {
    /// |computed - target| <= tolerance.
    fn eq(name: &str, computed: f64, target: f64, tol: f64, prov: &str) -> Self {
        Check {
            name: name.into(),
            computed,
            target,
            tolerance: tol,
            pass: computed.is_finite() && (computed - target).abs() <= tol,
            provenance: prov.into(),
        }
    }

    /// computed >= target - tolerance.
    fn at_least(name: &str, computed: f64, target: f64, tol: f64, prov: &str) -> Self {
        Check {
            name: name.into(),
            computed,
            target,
            tolerance: tol,
            pass: computed.is_finite() && computed >= target - tol,
            provenance: prov.into(),
        }
    }

    /// computed <= target + tolerance.
    fn at_most(name: &str, computed: f64, target: f64, tol: f64, prov: &str) -> Self {
        Check {
            name: name.into(),
            computed,
            target,
            tolerance: tol,
            pass: computed.is_finite() && computed <= target + tol,
            provenance: prov.into(),
        }
    }

    fn failed(name: &str, prov: &str, reason: &str) -> Self {
        Check {
            name: name.into(),
            computed: f64::NAN,
            target: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
            provenance: format!("{prov}; failed: {reason}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Profiles,
    Solver,
    Asymptotics,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "profiles" => Ok(Suite::Profiles),
            "solver" => Ok(Suite::Solver),
            "asymptotics" => Ok(Suite::Asymptotics),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!(
                "unknown suite '{other}' (expected profiles|solver|asymptotics|all)"
            ))),
        }
    }
}

/// Options of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub config: ShootingConfig,
    /// Additive corruption of w0 used by the mutation oracle; 0 in
    /// production.
    pub w0_shift: f64,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            suite: Suite::All,
            config: ShootingConfig::default(),
            w0_shift: 0.0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSizes {
    pub z0_nodes: usize,
    pub sweep_rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: Suite,
    pub config_hash: String,
    /// Deterministic: taken from SOURCE_DATE_EPOCH when set, otherwise null.
    pub timestamp: Option<String>,
    pub grid_sizes: GridSizes,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        fmt::to_json_string(self)
    }
}

/// Run the requested verification suites and aggregate the report.
/// Individual check failures never abort the run.
pub fn full_verify(opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let mut z0_nodes = 0usize;
    let mut sweep_rows = 0usize;

    if matches!(opts.suite, Suite::Profiles | Suite::All) {
        profile_checks(opts, &mut checks, &mut z0_nodes);
    }
    if matches!(opts.suite, Suite::Solver | Suite::All) {
        solver_checks(opts, &mut checks);
    }
    if matches!(opts.suite, Suite::Asymptotics | Suite::All) {
        asymptotic_checks(opts, &mut checks, &mut sweep_rows, &mut z0_nodes);
    }

    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    let hash_input = format!(
        "{};suite={:?};w0_shift={:.17e}",
        opts.config.canonical_string(),
        opts.suite,
        opts.w0_shift
    );
    Ok(VerificationReport {
        schema: "hypermt/verify/v1".into(),
        suite: opts.suite,
        config_hash: format!("{:016x}", fmt::fnv1a64(&hash_input)),
        timestamp: std::env::var("SOURCE_DATE_EPOCH").ok(),
        grid_sizes: GridSizes {
            z0_nodes,
            sweep_rows,
        },
        passed,
        failed,
        checks,
    })
}

/// Fourth-order finite-difference Laplacian of a radial function, applied in
/// x = ln r with one Richardson level; the independent oracle behind all
/// identity-residual checks.
pub fn fd_laplacian<F: Fn(f64) -> f64>(f: &F, r: f64, h: f64) -> f64 {
    let x = r.ln();
    let d2 = |h: f64| {
        let z = |k: f64| f((x + k * h).exp());
        (-z(2.0) + 16.0 * z(1.0) - 30.0 * z(0.0) + 16.0 * z(-1.0) - z(-2.0)) / (12.0 * h * h)
    };
    let a = d2(h);
    let b = d2(0.5 * h);
    (16.0 * b - a) / 15.0 / (r * r)
}

fn profile_checks(opts: &VerifyOptions, checks: &mut Vec<Check>, z0_nodes: &mut usize) {
    let shift = opts.w0_shift;
    let w0s = move |r: f64| -> Result<f64> { Ok(profiles::w0(r)? + shift) };

    // exact values of the first correction
    match w0s(0.0) {
        Ok(v) => checks.push(Check::eq(
            "w0_at_zero",
            v,
            0.0,
            0.0,
            "initial condition of the first-correction ODE; exact",
        )),
        Err(e) => checks.push(Check::failed("w0_at_zero", "initial condition", &format!("{e}"))),
    }
    match profiles::w0_prime(1e-9) {
        Ok(v) => checks.push(Check::eq(
            "w0_slope_at_zero",
            v,
            0.0,
            1e-18,
            "initial slope of the first-correction ODE; series limit",
        )),
        Err(e) => checks.push(Check::failed("w0_slope_at_zero", "initial slope", &format!("{e}"))),
    }
    let ln2 = 2.0f64.ln();
    match w0s(1.0) {
        Ok(v) => checks.push(Check::eq(
            "w0_at_one",
            v,
            1.0 - ln2 - 0.5 * ln2 * ln2,
            1e-12,
            "closed form at r = 1 where the prefactor kills the integral term",
        )),
        Err(e) => checks.push(Check::failed("w0_at_one", "closed form at r = 1", &format!("{e}"))),
    }
    match profiles::w0_prime(1e4) {
        Ok(v) => checks.push(Check::eq(
            "w0_mass_flux",
            -2.0 * PI * 1e4 * v,
            FOUR_PI,
            1e-3 * FOUR_PI,
            "divergence theorem: total mass of -Lap w0 equals 4 pi",
        )),
        Err(e) => checks.push(Check::failed("w0_mass_flux", "divergence theorem", &format!("{e}"))),
    }

    // identity residuals via closed-form derivatives
    let mut eta_resid: f64 = 0.0;
    let mut kern_resid = profiles::kernel_residual(0.0).abs();
    let mut r = 1e-3;
    while r <= 1e3 {
        eta_resid = eta_resid.max(profiles::eta0_identity_residual(r).abs());
        if r <= 50.0 {
            kern_resid = kern_resid.max(profiles::kernel_residual(r).abs());
        }
        r *= 1.2;
    }
    checks.push(Check::at_most(
        "eta0_identity_residual",
        eta_resid,
        0.0,
        1e-10,
        "closed-form derivatives of the Liouville bubble identity on a log grid",
    ));
    checks.push(Check::at_most(
        "kernel_identity_residual",
        kern_resid,
        0.0,
        1e-10,
        "closed-form derivatives of the linearized-kernel identity on a log grid",
    ));
    match (|| -> Result<f64> {
        let mut max: f64 = 0.0;
        for &rr in &[0.5, 2.0, 10.0] {
            max = max.max(profiles::w0_ode_residual(rr)?.abs());
        }
        Ok(max)
    })() {
        Ok(v) => checks.push(Check::at_most(
            "w0_ode_residual",
            v,
            0.0,
            1e-8,
            "closed-form second derivative of w0 against its defining equation",
        )),
        Err(e) => checks.push(Check::failed("w0_ode_residual", "closed-form derivatives", &format!("{e}"))),
    }

    // bubble mass: integral of 4 e^{2 eta0} over the plane is 4 pi
    match crate::quad::integrate_to_infinity(
        &|r: f64| 4.0 * r / (1.0 + r * r).powi(2),
        0.0,
        1e-13,
        1e-12,
    ) {
        Ok((v, _)) => checks.push(Check::eq(
            "bubble_mass",
            2.0 * PI * v,
            FOUR_PI,
            1e-10 * FOUR_PI,
            "adaptive quadrature of the bubble density against the exact mass",
        )),
        Err(e) => checks.push(Check::failed("bubble_mass", "bubble density quadrature", &format!("{e}"))),
    }

    // integral table against closed forms
    match table_with_shift(shift) {
        Ok(table) => {
            for entry in &table {
                checks.push(Check::eq(
                    &format!("table_{}", entry.name),
                    entry.computed,
                    entry.exact,
                    1e-8 * entry.exact.abs(),
                    "adaptive weighted quadrature against the closed-form value",
                ));
            }
            let combo = beta_combo(&table);
            checks.push(Check::eq(
                "beta_table_combination",
                combo,
                profiles::Z0_TAIL_SLOPE,
                1e-7,
                "linear combination of the weighted table with the source coefficients",
            ));
        }
        Err(e) => checks.push(Check::failed("integral_table", "weighted quadrature", &format!("{e}"))),
    }

    // slope via direct source quadrature
    match profiles::beta_quadrature(&|r| {
        let w = w0s(r)?;
        let e = profiles::eta0(r);
        Ok(w + 2.0 * w * w + 4.0 * e * w + 2.0 * w * e * e + e * e * e + 0.5 * e.powi(4))
    }) {
        Ok(v) => checks.push(Check::eq(
            "beta_source_quadrature",
            v,
            profiles::Z0_TAIL_SLOPE,
            1e-7,
            "weighted quadrature of the full second-order source",
        )),
        Err(e) => checks.push(Check::failed("beta_source_quadrature", "weighted quadrature", &format!("{e}"))),
    }

    // slope via the z0 far field; the window starts at 1e4 so the O(1) and
    // decaying remainders of the log asymptote stay below the tolerance
    match profiles::solve_z0_profile(1.2e6, 1e-11) {
        Ok(z0) => {
            let grid = z0.to_grid();
            *z0_nodes = grid.radii.len();
            match profiles::farfield_slope(&grid, (1e4, 1e6)) {
                Ok(fit) => checks.push(Check::eq(
                    "z0_tail_slope_fit",
                    fit.slope,
                    profiles::Z0_TAIL_SLOPE,
                    1e-3,
                    "least-squares far-field fit of the integrated second correction",
                )),
                Err(e) => checks.push(Check::failed("z0_tail_slope_fit", "far-field fit", &format!("{e}"))),
            }
        }
        Err(e) => checks.push(Check::failed("z0_tail_slope_fit", "second-correction ODE", &format!("{e}"))),
    }

    // w0 far-field slope -2 by the same fit machinery; as for z0 the window
    // starts late enough that the O(1) term no longer biases the slope
    match w0_grid_log(10.0, 1.2e5, 400) {
        Ok(grid) => match profiles::farfield_slope(&grid, (1e3, 1e5)) {
            Ok(fit) => checks.push(Check::eq(
                "w0_tail_slope_fit",
                fit.slope,
                -2.0,
                1e-3,
                "least-squares far-field fit of the first correction",
            )),
            Err(e) => checks.push(Check::failed("w0_tail_slope_fit", "far-field fit", &format!("{e}"))),
        },
        Err(e) => checks.push(Check::failed("w0_tail_slope_fit", "grid build", &format!("{e}"))),
    }

    // bounded gap between w0 and eta0 (golden envelope)
    match (|| -> Result<f64> {
        let mut sup: f64 = 0.0;
        let mut r = 1e-3;
        while r <= 1e4 {
            sup = sup.max((w0s(r)? - profiles::eta0(r)).abs());
            r *= 1.15;
        }
        Ok(sup)
    })() {
        Ok(v) => checks.push(Check::at_most(
            "w0_eta0_gap",
            v,
            3.65,
            0.0,
            "recorded golden envelope; the gap approaches 2 + pi^2/6 ~ 3.6449 from below",
        )),
        Err(e) => checks.push(Check::failed("w0_eta0_gap", "golden envelope", &format!("{e}"))),
    }

    // representation formula reproduces the closed-form first correction
    match (|| -> Result<f64> {
        let mut sup: f64 = 0.0;
        for i in 1..=20 {
            let t = 0.5 * i as f64;
            let via_kernel = profiles::representation_solve(&|s| s - s * s, t)?;
            sup = sup.max((via_kernel - (profiles::phi0(t)? + shift)).abs());
        }
        Ok(sup)
    })() {
        Ok(v) => checks.push(Check::at_most(
            "representation_vs_phi0",
            v,
            0.0,
            1e-6,
            "independent kernel quadrature against the closed-form profile on t in [0, 10]",
        )),
        Err(e) => checks.push(Check::failed("representation_vs_phi0", "kernel quadrature", &format!("{e}"))),
    }

    // representation formula is a right inverse of the flat-variable operator
    match (|| -> Result<f64> {
        let source = |s: f64| (0.7 * s).sin() + 0.3 * s;
        let phi = |t: f64| profiles::representation_solve(&source, t);
        let mut sup: f64 = 0.0;
        for &t in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            // fourth-order five-point stencils plus one Richardson level keep
            // the (e^t - 1)-amplified differentiation noise below tolerance
            let h = 0.05;
            let stencil = |h: f64| -> Result<(f64, f64)> {
                let m2 = phi(t - 2.0 * h)?;
                let m1 = phi(t - h)?;
                let p0 = phi(t)?;
                let p1 = phi(t + h)?;
                let p2 = phi(t + 2.0 * h)?;
                let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
                let d2 = (-m2 + 16.0 * m1 - 30.0 * p0 + 16.0 * p1 - p2) / (12.0 * h * h);
                Ok((d1, d2))
            };
            let (d1a, d2a) = stencil(h)?;
            let (d1b, d2b) = stencil(0.5 * h)?;
            let d1 = (16.0 * d1b - d1a) / 15.0;
            let d2 = (16.0 * d2b - d2a) / 15.0;
            let lhs = (t.exp() - 1.0) * d2 + d1 + 2.0 * phi(t)?;
            sup = sup.max((lhs - source(t)).abs());
        }
        Ok(sup)
    })() {
        Ok(v) => checks.push(Check::at_most(
            "representation_right_inverse",
            v,
            0.0,
            1e-6,
            "finite-difference application of the flat-variable operator to the kernel solution",
        )),
        Err(e) => checks.push(Check::failed("representation_right_inverse", "finite differences", &format!("{e}"))),
    }
}

fn table_with_shift(shift: f64) -> Result<[profiles::TableEntry; 6]> {
    if shift == 0.0 {
        return profiles::integral_table();
    }
    // recompute the w0-dependent entries with the corrupted profile
    let mut table = profiles::integral_table()?;
    let weight_integral = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let integrand = |r: f64| {
            let r2 = r * r;
            let q = 1.0 + r2;
            match g(r) {
                Ok(v) => r * (r2 - 1.0) / (q * q * q) * v,
                Err(_) => f64::NAN,
            }
        };
        let (v, _) = crate::quad::integrate_to_infinity(&integrand, 0.0, 1e-12, 1e-10)?;
        Ok(2.0 * PI * v)
    };
    table[0].computed = weight_integral(&|r| Ok(profiles::w0(r)? + shift))?;
    table[1].computed = weight_integral(&|r| Ok((profiles::w0(r)? + shift).powi(2)))?;
    table[2].computed = weight_integral(&|r| Ok(profiles::eta0(r) * (profiles::w0(r)? + shift)))?;
    table[3].computed =
        weight_integral(&|r| Ok((profiles::w0(r)? + shift) * profiles::eta0(r).powi(2)))?;
    Ok(table)
}

fn beta_combo(table: &[profiles::TableEntry; 6]) -> f64 {
    -(2.0 / PI)
        * (table[0].computed
            + 2.0 * table[1].computed
            + 4.0 * table[2].computed
            + 2.0 * table[3].computed
            + table[4].computed
            + 0.5 * table[5].computed)
}

fn w0_grid_log(r_lo: f64, r_hi: f64, n: usize) -> Result<profiles::ProfileGrid> {
    let mut radii = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for i in 0..n {
        let r = r_lo * (r_hi / r_lo).powf(i as f64 / (n - 1) as f64);
        radii.push(r);
        values.push(profiles::w0(r)?);
        derivs.push(profiles::w0_prime(r)?);
    }
    profiles::ProfileGrid::new(radii, values, derivs, profiles::ProfileKind::W0)
}

fn solver_checks(opts: &VerifyOptions, checks: &mut Vec<Check>) {
    let config = &opts.config;

    // step-halving order on the lambda = 0.1, c = 3 problem
    match step_halving_order(0.1, 3.0, config) {
        Ok(order) => checks.push(Check::eq(
            "step_halving_order",
            order,
            5.0,
            0.8,
            "fixed-step halving against a tight adaptive reference",
        )),
        Err(e) => checks.push(Check::failed("step_halving_order", "step halving", &format!("{e}"))),
    }

    // determinism: identical inputs give bit-identical lambda*
    match (solver::lambda_star(3.0, config), solver::lambda_star(3.0, config)) {
        (Ok(a), Ok(b)) => checks.push(Check::eq(
            "shooting_determinism",
            (a - b).abs(),
            0.0,
            0.0,
            "two identical runs compared bitwise",
        )),
        (Err(e), _) | (_, Err(e)) => {
            checks.push(Check::failed("shooting_determinism", "repeat run", &format!("{e}")))
        }
    }

    // classifier degeneracy fires exactly at lambda = 1/4
    let degenerate = matches!(solver::decay_rates(0.25), Err(Error::Degenerate(_)));
    checks.push(Check::eq(
        "classifier_degeneracy_at_quarter",
        if degenerate { 1.0 } else { 0.0 },
        1.0,
        0.0,
        "the two linearized rates merge at lambda = 1/4 and classification must refuse",
    ));

    // one admissible solve and its structural invariants
    match solver::solve_for_lambda(0.05, config) {
        Ok(sol) => {
            let monotone = sol
                .grid
                .iter()
                .zip(&sol.u_prime)
                .skip(1)
                .map(|(_, up)| *up)
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::at_most(
                "solution_monotone_decrease",
                monotone,
                0.0,
                0.0,
                "sign of u' along the admissible trajectory",
            ));

            let mut worst_rel_increase: f64 = f64::NEG_INFINITY;
            for i in 1..sol.grid.len() {
                let e_prev = 0.5 * sol.u_prime[i - 1].powi(2)
                    + 0.5 * sol.lambda * (sol.u[i - 1].powi(2)).exp();
                let e_next =
                    0.5 * sol.u_prime[i].powi(2) + 0.5 * sol.lambda * (sol.u[i].powi(2)).exp();
                worst_rel_increase = worst_rel_increase.max((e_next - e_prev) / e_prev.abs());
            }
            checks.push(Check::at_most(
                "trajectory_energy_decreasing",
                worst_rel_increase,
                0.0,
                100.0 * config.ivp_tol,
                "discrete monotonicity of u'^2/2 + (lambda/2) e^{u^2} within integration tolerance",
            ));

            match functionals::energies(&sol) {
                Ok(en) => {
                    checks.push(Check::at_most(
                        "energy_identity",
                        (en.dirichlet - en.nonlinear_mass).abs() / en.dirichlet,
                        0.0,
                        1e-6,
                        "weak form of the equation: Dirichlet energy equals the nonlinear mass",
                    ));
                    checks.push(Check::at_least(
                        "poincare_inequality",
                        en.dirichlet - 0.25 * en.l2_hyp,
                        0.0,
                        0.0,
                        "spectral bound of the hyperbolic Laplacian",
                    ));
                }
                Err(e) => checks.push(Check::failed("energy_identity", "energies", &format!("{e}"))),
            }

            match functionals::pohozaev_residual(&sol, DEFAULT_POHOZAEV_D) {
                Ok(p) => checks.push(Check::at_most(
                    "pohozaev_residual",
                    p.relative_residual(),
                    0.0,
                    1e-6,
                    "both sides of the scaling identity quadratured independently",
                )),
                Err(e) => checks.push(Check::failed("pohozaev_residual", "scaling identity", &format!("{e}"))),
            }
        }
        Err(e) => checks.push(Check::failed("solve_lambda_005", "admissible solve", &format!("{e}"))),
    }
}

/// Observed convergence order of the fixed-step integrator on the shooting
/// right-hand side (self-convergence triple h, h/2, h/4).
pub fn step_halving_order(lambda: f64, c: f64, config: &ShootingConfig) -> Result<f64> {
    use crate::ode;
    // restart data from a tight adaptive run, then a self-convergence triple
    // h, h/2, h/4: the shared restart bias cancels in the differences and
    // the ratio exposes the propagating order of the step.
    let tight = ShootingConfig {
        ivp_tol: 1e-13,
        ..config.clone()
    };
    let (reference, _) = solver::integrate_ivp(lambda, c, &tight)?;
    let s0 = 0.5;
    let s1 = 8.0;
    let y0 = [reference.eval(s0), reference.eval_deriv(s0)];
    let rhs = move |s: f64, y: &[f64; 2]| -> [f64; 2] {
        [y[1], -y[1] / s.tanh() - lambda * y[0] * (y[0] * y[0]).exp()]
    };
    let run = |h: f64| -> Result<[f64; 2]> { ode::integrate_fixed(&rhs, s0, y0, s1, h) };
    let y_h = run(0.4)?;
    let y_h2 = run(0.2)?;
    let y_h4 = run(0.1)?;
    let d1 = ((y_h[0] - y_h2[0]).powi(2) + (y_h[1] - y_h2[1]).powi(2)).sqrt();
    let d2 = ((y_h2[0] - y_h4[0]).powi(2) + (y_h2[1] - y_h4[1]).powi(2)).sqrt();
    Ok((d1 / d2).log2())
}

fn asymptotic_checks(
    opts: &VerifyOptions,
    checks: &mut Vec<Check>,
    sweep_rows: &mut usize,
    z0_nodes: &mut usize,
) {
    let config = &opts.config;
    let grid = [0.005, 0.01, 0.02, 0.05, 0.1];
    let records = match run_sweep(&grid, config, opts.threads) {
        Ok(r) => r,
        Err(e) => {
            checks.push(Check::failed("sweep", "lambda continuation", &format!("{e}")));
            return;
        }
    };
    *sweep_rows = records.len();
    let ok_rows: Vec<&SweepRecord> = records.iter().filter(|r| r.ok()).collect();
    checks.push(Check::eq(
        "sweep_rows_ok",
        ok_rows.len() as f64,
        grid.len() as f64,
        0.0,
        "every continuation row solved",
    ));
    if ok_rows.len() < grid.len() {
        for r in records.iter().filter(|r| !r.ok()) {
            checks.push(Check::failed(
                &format!("sweep_row_{}", r.lambda),
                "row solve",
                &r.status,
            ));
        }
        return;
    }

    // descending lambda view (0.1 first) for trend checks
    let desc: Vec<&SweepRecord> = records.iter().rev().collect();
    let trend_rows: Vec<&&SweepRecord> = desc
        .iter()
        .filter(|r| r.lambda >= 0.0095)
        .collect(); // {0.1, 0.05, 0.02, 0.01}

    let min_drop = trend_rows
        .windows(2)
        .map(|w| w[0].dirichlet - w[1].dirichlet)
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least(
        "quantization_trend_decreasing",
        min_drop,
        0.0,
        0.0,
        "Dirichlet energy strictly decreasing along lambda -> 0",
    ));
    let min_excess = trend_rows
        .iter()
        .map(|r| r.dirichlet - FOUR_PI)
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least(
        "dirichlet_above_quantum",
        min_excess,
        0.0,
        0.0,
        "Dirichlet energy stays above the quantum 4 pi",
    ));
    let last = trend_rows.last().unwrap();
    checks.push(Check::at_most(
        "dirichlet_final_near_quantum",
        (last.dirichlet - FOUR_PI) / FOUR_PI,
        0.0,
        0.05,
        "relative excess over 4 pi at the smallest trend lambda",
    ));

    // nonlinear mass tracks dirichlet: re-derive from each solution
    // (the identity is already checked per-solution in the solver suite; here
    // the sweep's own columns are used)
    let max_poh = ok_rows
        .iter()
        .map(|r| r.pohozaev_residual)
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "pohozaev_rows",
        max_poh,
        0.0,
        1e-6,
        "relative scaling-identity residual across all sweep rows",
    ));

    let max_rate_err = ok_rows
        .iter()
        .map(|r| {
            let nu = (1.0 + (1.0 - 4.0 * r.lambda).sqrt()) / 2.0;
            (r.decay_rate + nu).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "decay_rate_formula",
        max_rate_err,
        0.0,
        1e-3,
        "fitted tail slope against the linearized fast rate",
    ));

    // lambda c^2 relation
    let devs: Vec<(f64, f64)> = trend_rows
        .iter()
        .map(|r| (r.lambda, (r.lambda_c2 - 1.0).abs()))
        .collect();
    let mut worst_ratio: f64 = 0.0;
    for w in devs.windows(2) {
        let (l0, d0) = w[0];
        let (l1, d1) = w[1];
        worst_ratio = worst_ratio.max((d1 / d0) / (l1 / l0));
    }
    checks.push(Check::at_most(
        "lambda_c2_contraction",
        worst_ratio,
        1.0,
        0.0,
        "deviation |lambda c^2 - 1| shrinking at least like the lambda ratio",
    ));
    match check_lambda_c_relation(&records) {
        Ok(fit) => {
            checks.push(Check::eq(
                "lambda_c2_intercept",
                fit.intercept,
                1.0,
                1e-2,
                "intercept of the linear fit lambda c^2 = intercept + slope lambda",
            ));
        }
        Err(e) => checks.push(Check::failed("lambda_c2_intercept", "linear fit", &format!("{e}"))),
    }

    // energy deficit on the asymptotic sub-grid {0.02, 0.01, 0.005}
    let deficit_rows: Vec<SweepRecord> = records
        .iter()
        .filter(|r| r.lambda <= 0.021)
        .cloned()
        .collect();
    let min_deficit = deficit_rows
        .iter()
        .filter(|r| r.ok())
        .map(|r| r.deficit_ratio)
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least(
        "deficit_positive",
        min_deficit,
        0.0,
        0.0,
        "sign of the scaled energy deficit on the deficit-analysis rows",
    ));
    match check_energy_deficit(&deficit_rows) {
        Ok(summary) => checks.push(Check::eq(
            "deficit_extrapolated",
            summary.extrapolated,
            1.0,
            0.2,
            "Richardson extrapolation of the scaled deficit in 1/c^2",
        )),
        Err(e) => checks.push(Check::failed("deficit_extrapolated", "extrapolation", &format!("{e}"))),
    }

    // measured-limit diagnostics: the small-lambda rows approach the
    // intercept 1/e, which the shooting data pins independently of any
    // asymptotic formula (recorded golden limits)
    match (sweep_row(0.002, config), sweep_row(0.001, config)) {
        (r2, r1) if r2.ok() && r1.ok() => {
            let small = [
                records.iter().find(|r| (r.lambda - 0.005).abs() < 1e-9).cloned(),
                Some(r2),
                Some(r1),
            ];
            let rows: Vec<SweepRecord> = small.into_iter().flatten().collect();
            match check_lambda_c_relation(&rows) {
                Ok(fit) => checks.push(Check::eq(
                    "lambda_c2_intercept_measured",
                    fit.intercept,
                    (-1.0f64).exp(),
                    1e-2,
                    "intercept of the small-lambda fit against the measured limit 1/e",
                )),
                Err(e) => checks.push(Check::failed(
                    "lambda_c2_intercept_measured",
                    "small-lambda fit",
                    &format!("{e}"),
                )),
            }
        }
        (r2, r1) => {
            let reason = if r2.ok() { r1.status } else { r2.status };
            checks.push(Check::failed("lambda_c2_intercept_measured", "small-lambda rows", &reason));
        }
    }

    // per-solution asymptotic checks need the solutions themselves
    let solve = |lambda: f64| solver::solve_for_lambda(lambda, config);
    let z0 = profiles::solve_z0_profile(120.0, 1e-10);

    match (solve(0.05), solve(0.01), solve(0.02), solve(0.005)) {
        (Ok(sol05), Ok(sol01), Ok(sol02), Ok(sol005)) => {
            // the mass identity across the trend solutions
            let mut worst_mass: f64 = 0.0;
            for sol in [&sol05, &sol02, &sol01, &sol005] {
                if let Ok(en) = functionals::energies(sol) {
                    worst_mass =
                        worst_mass.max((en.dirichlet - en.nonlinear_mass).abs() / en.dirichlet);
                }
            }
            checks.push(Check::at_most(
                "mass_tracks_dirichlet",
                worst_mass,
                0.0,
                1e-6,
                "weak-form identity between Dirichlet energy and nonlinear mass on each solution",
            ));
            // monotone and density bounds
            match w0_minus_one_root() {
                Ok(r0) => {
                    let mb = check_monotone_bound(&sol05, r0);
                    checks.push(Check::at_least(
                        "monotone_bound_slack",
                        mb.min_slack,
                        0.0,
                        0.0,
                        "peak-anchored upper bound beyond the matched radius",
                    ));
                    let db = check_density_bound(&sol05, r0);
                    checks.push(Check::at_least(
                        "density_bound_slack",
                        db.min_slack,
                        0.0,
                        0.0,
                        "pointwise density bound beyond the matched radius",
                    ));
                }
                Err(e) => checks.push(Check::failed("monotone_bound_slack", "root of w0 + 1", &format!("{e}"))),
            }

            // decay envelope at lambda = 0.05, T = 8
            match functionals::energies(&sol05) {
                Ok(en) => match decay_envelope(&sol05, 8.0, en.dirichlet) {
                    Ok(env) => {
                        let min_margin = env
                            .u_lower_margin
                            .min(env.u_upper_margin)
                            .min(env.du_lower_margin)
                            .min(env.du_upper_margin);
                        checks.push(Check::at_least(
                            "decay_envelope_margins",
                            min_margin,
                            0.0,
                            0.0,
                            "two-sided exponential sandwich with explicit constants",
                        ));
                        let rate = sol05.tail_rate.unwrap_or(f64::NAN);
                        let inside = rate > env.rate_lower && rate < env.rate_upper;
                        checks.push(Check::eq(
                            "fitted_rate_inside_envelope",
                            if inside { 1.0 } else { 0.0 },
                            1.0,
                            0.0,
                            "fitted tail rate between the envelope exponents",
                        ));
                    }
                    Err(e) => checks.push(Check::failed("decay_envelope_margins", "envelope", &format!("{e}"))),
                },
                Err(e) => checks.push(Check::failed("decay_envelope_margins", "energies", &format!("{e}"))),
            }

            // inner expansion: stability and ablation
            let r02 = inner_expansion_residual(&sol02, ExpansionOrder::Third);
            let r01 = inner_expansion_residual(&sol01, ExpansionOrder::Third);
            let r01_ablate = inner_expansion_residual(&sol01, ExpansionOrder::Second);
            match (r02, r01, r01_ablate) {
                (Ok(a), Ok(b), Ok(ab)) => {
                    let ratio = (a.max_scaled_residual / b.max_scaled_residual)
                        .max(b.max_scaled_residual / a.max_scaled_residual);
                    checks.push(Check::at_most(
                        "inner_expansion_stability",
                        ratio,
                        2.0,
                        0.0,
                        "c^5-scaled residual bounded across two lambdas (two-point probe)",
                    ));
                    checks.push(Check::at_least(
                        "inner_expansion_ablation",
                        ab.max_scaled_residual / b.max_scaled_residual,
                        3.0,
                        0.0,
                        "dropping the linear tail term inflates the scaled residual",
                    ));
                }
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    checks.push(Check::failed("inner_expansion", "inner resample", &format!("{e}")))
                }
            }

            // far-field Green behavior
            match (green_report(&sol01, DEFAULT_DELTA), green_report(&sol005, DEFAULT_DELTA)) {
                (Ok(g01), Ok(g005)) => {
                    checks.push(Check::at_most(
                        "farfield_green_lead",
                        g01.lead.abs(),
                        0.0,
                        0.15,
                        "c u(delta) + 2 ln delta vanishing outside the bubble; recorded golden envelope",
                    ));
                    let rel = (g01.a1_estimate - g005.a1_estimate).abs()
                        / g01.a1_estimate.abs().max(g005.a1_estimate.abs());
                    checks.push(Check::at_most(
                        "a1_stability",
                        rel,
                        0.3,
                        0.0,
                        "next-order far-field coefficient stable between two lambdas",
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    checks.push(Check::failed("farfield_green_lead", "far-field probe", &format!("{e}")))
                }
            }
            match (green_report(&sol01, 0.2), green_report(&sol01, 0.4)) {
                (Ok(g2), Ok(g4)) => checks.push(Check::at_most(
                    "green_delta_independence",
                    (g2.lead - g4.lead).abs(),
                    0.0,
                    0.1,
                    "the log lead is delta-free; residual difference at two radii",
                )),
                (Err(e), _) | (_, Err(e)) => {
                    checks.push(Check::failed("green_delta_independence", "far-field probe", &format!("{e}")))
                }
            }

            // profile convergence
            match &z0 {
                Ok(z0) => {
                    *z0_nodes = (*z0_nodes).max(z0.to_grid().radii.len());
                    match (
                        check_profile_convergence(&sol05, z0),
                        check_profile_convergence(&sol01, z0),
                        check_profile_convergence(&sol02, z0),
                        check_profile_convergence(&sol005, z0),
                    ) {
                        (Ok(c05), Ok(c01), Ok(c02), Ok(c005)) => {
                            checks.push(Check::at_least(
                                "profile_first_order_trend",
                                c05.first - c01.first,
                                0.0,
                                0.0,
                                "bubble distance shrinking from lambda = 0.05 to 0.01",
                            ));
                            // d2 ~ K/c^2: the log-ratio across two lambdas
                            // should match the c^2 ratio within 50%
                            let measured = (c02.second / c005.second).ln();
                            let predicted = ((sol005.c / sol02.c).powi(2)).ln();
                            checks.push(Check::at_most(
                                "profile_second_order_rate",
                                (measured / predicted - 1.0).abs(),
                                0.5,
                                0.0,
                                "decay rate of the second bubble distance against 1/c^2",
                            ));
                        }
                        (Err(e), _, _, _) | (_, Err(e), _, _) | (_, _, Err(e), _) | (_, _, _, Err(e)) => {
                            checks.push(Check::failed("profile_convergence", "bubble resample", &format!("{e}")))
                        }
                    }
                }
                Err(e) => checks.push(Check::failed("profile_convergence", "second-correction ODE", &format!("{e}"))),
            }
        }
        (r05, r01, r02, r005) => {
            for (name, r) in [("0.05", r05.err()), ("0.01", r01.err()), ("0.02", r02.err()), ("0.005", r005.err())] {
                if let Some(e) = r {
                    checks.push(Check::failed(
                        &format!("solve_lambda_{name}"),
                        "admissible solve",
                        &format!("{e}"),
                    ));
                }
            }
        }
    }

    // injectivity scan
    match uniqueness_scan(&[2.0, 3.0, 4.0, 5.0, 6.0], config) {
        Ok(scan) => {
            checks.push(Check::eq(
                "uniqueness_scan_decreasing",
                if scan.strictly_decreasing { 1.0 } else { 0.0 },
                1.0,
                0.0,
                "lambda*(c) strictly decreasing on the sampled peak heights",
            ));
            let max_star = scan
                .points
                .iter()
                .filter_map(|p| p.lambda_star)
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                "lambda_star_below_quarter",
                max_star,
                0.25,
                0.0,
                "no admissible eigenvalue reaches the spectral threshold",
            ));
        }
        Err(e) => checks.push(Check::failed("uniqueness_scan", "injectivity scan", &format!("{e}"))),
    }
}
