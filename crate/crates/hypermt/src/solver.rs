//! Shooting solver for the geodesic radial equation
//!
//! ```text
//!   u'' + coth(s) u' + lambda u e^{u^2} = 0,   u(0) = c,  u'(0) = 0,
//! ```
//!
//! whose admissible solutions decay like e^{-nu s} with
//! nu = (1 + sqrt(1 - 4 lambda))/2. Trajectories that cross zero bracket the
//! admissible lambda from above, slow-decay trajectories from below, and
//! bisection pins the fast-decay lambda*(c) between them.
//!
//! Near the shooting parameter the computed trajectory leaves the true
//! solution once the slow mode, seeded at the bisection-bracket level, has
//! grown to meet it. The solver measures that point by comparing the two
//! bracket-endpoint trajectories and truncates the returned grid where they
//! agree to a set relative tolerance, so every stored sample is trustworthy;
//! integrals continue past the truncation through the fitted exponential
//! tail.

use crate::error::{Error, Result};
use crate::ode::{self, AdaptiveOptions, Trajectory};

/// Largest admissible peak: e^{u^2} must stay inside f64 range.
pub const MAX_C_SQUARED: f64 = 700.0;

/// Fast/slow linearized decay rates at the far end, -(1 +/- sqrt(1-4 lambda))/2.
pub fn decay_rates(lambda: f64) -> Result<(f64, f64)> {
    if !(0.0..0.25).contains(&lambda) {
        if lambda == 0.25 {
            return Err(Error::Degenerate(
                "both linearized decay rates equal -1/2 at lambda = 1/4; no classification is possible".into(),
            ));
        }
        return Err(Error::Domain(format!(
            "decay rates require 0 <= lambda < 1/4, got {lambda}"
        )));
    }
    let root = (1.0 - 4.0 * lambda).sqrt();
    Ok((-(1.0 + root) / 2.0, -(1.0 - root) / 2.0))
}

/// Configuration of the shooting pipeline.
#[derive(Debug, Clone)]
pub struct ShootingConfig {
    /// Truncation point of the initial-value integrations.
    pub s_max: f64,
    /// Relative tolerance of the adaptive integrator.
    pub ivp_tol: f64,
    /// Bisection width on lambda (or on c in the outer solve).
    pub bisect_tol: f64,
    /// Left end of the classification window (right end is s_max).
    pub classify_at: f64,
    /// Upper cap on the series start point; the effective start also shrinks
    /// with the bubble scale so the truncated series stays far below ivp_tol.
    pub series_start: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        let s_max = 80.0;
        ShootingConfig {
            s_max,
            ivp_tol: 1e-11,
            bisect_tol: 1e-12,
            classify_at: 0.8 * s_max,
            series_start: 1e-4,
        }
    }
}

impl ShootingConfig {
    fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0
            && self.ivp_tol > 0.0
            && self.bisect_tol > 0.0
            && self.classify_at > 0.0
            && self.series_start > 0.0)
        {
            return Err(Error::Domain("shooting config fields must be positive".into()));
        }
        if self.classify_at >= self.s_max {
            return Err(Error::Domain(format!(
                "classify_at = {} must lie below s_max = {}",
                self.classify_at, self.s_max
            )));
        }
        Ok(())
    }

    /// Canonical rendering for config hashes.
    pub fn canonical_string(&self) -> String {
        format!(
            "s_max={:.17e};ivp_tol={:.17e};bisect_tol={:.17e};classify_at={:.17e};series_start={:.17e}",
            self.s_max, self.ivp_tol, self.bisect_tol, self.classify_at, self.series_start
        )
    }
}

/// Taylor start of the trajectory at the origin,
/// u = c (1 + A (s/s0)^2 + B (s/s0)^4) + O(s^6),
/// stored in the normalized form so the raw s^4 coefficient (which scales
/// like lambda^2 c e^{2 c^2}) never overflows.
#[derive(Debug, Clone, Copy)]
struct SeriesStart {
    /// normalized s^2 coefficient, A = a2 s0^2 / c
    a: f64,
    /// normalized s^4 coefficient, B = a4 s0^4 / c
    b: f64,
    s0: f64,
    c: f64,
}

impl SeriesStart {
    fn new(lambda: f64, c: f64, cap: f64) -> Self {
        // a2 = -lambda c e^{c^2} / 4;
        // 16 a4 + 2 a2 / 3 + lambda e^{c^2} (1 + 2 c^2) a2 = 0.
        let a2 = -0.25 * lambda * c * (c * c).exp();
        // keep |a2| s0^2 / c at 1e-6 so the dropped s^6 term is ~1e-18 c
        let s0 = if a2 == 0.0 {
            cap
        } else {
            cap.min(1e-3 * (c / a2.abs()).sqrt())
        };
        let s02 = s0 * s0;
        let a = a2 * s02 / c;
        // q = s0^2 lambda e^{c^2} stays bounded by construction of s0
        let q = s02 * lambda * (c * c).exp();
        let b = -a * (2.0 * s02 / 3.0 + q * (1.0 + 2.0 * c * c)) / 16.0;
        SeriesStart { a, b, s0, c }
    }

    fn value(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.c;
        }
        let t2 = (s / self.s0) * (s / self.s0);
        self.c * (1.0 + self.a * t2 + self.b * t2 * t2)
    }

    fn deriv(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let t = s / self.s0;
        self.c * (2.0 * self.a * t + 4.0 * self.b * t * t * t) / self.s0
    }

    /// u''(0) = 2 a2.
    fn second_at_origin(&self) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        2.0 * self.a * self.c / (self.s0 * self.s0)
    }
}

/// Classification of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotOutcome {
    /// u reached zero at finite s.
    CrossedZero { s_cross: f64 },
    /// Far-field log-slope above -1/2: the subcritical branch.
    SlowDecay { rate: f64 },
    /// Far-field log-slope below -1/2: the admissible branch.
    FastDecay {
        rate: f64,
        tail_amplitude: Option<f64>,
    },
}

/// A computed radial solution on the geodesic grid.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub lambda: f64,
    /// Peak height u(0).
    pub c: f64,
    /// Euclidean blow-up scale (lambda c^2 e^{c^2})^{-1/2}.
    pub r_lambda: f64,
    /// Geodesic nodes, starting at exactly 0.
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    /// A in u ~ A e^{-nu s}, once fitted.
    pub tail_amplitude: Option<f64>,
    /// Fitted tail log-slope (~ -nu).
    pub tail_rate: Option<f64>,
    series: SeriesStart,
}

impl RadialSolution {
    /// Build a solution object from explicit samples (tests and synthetic
    /// trajectories). The grid must start at 0 with u(0) = c, u'(0) = 0.
    pub fn from_samples(
        lambda: f64,
        c: f64,
        grid: Vec<f64>,
        u: Vec<f64>,
        u_prime: Vec<f64>,
    ) -> Result<Self> {
        if grid.len() != u.len() || grid.len() != u_prime.len() || grid.len() < 2 {
            return Err(Error::Domain("sample columns must share a length >= 2".into()));
        }
        if grid[0] != 0.0 || !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("grid must start at 0 and increase strictly".into()));
        }
        if u[0] != c || u_prime[0] != 0.0 {
            return Err(Error::Domain("samples must satisfy u(0) = c, u'(0) = 0".into()));
        }
        let r_lambda = if lambda > 0.0 && c > 0.0 {
            (lambda * c * c * (c * c).exp()).powf(-0.5)
        } else {
            f64::INFINITY
        };
        Ok(RadialSolution {
            lambda,
            c,
            r_lambda,
            grid,
            u,
            u_prime,
            tail_amplitude: None,
            tail_rate: None,
            series: SeriesStart {
                a: 0.0,
                b: 0.0,
                s0: 0.0,
                c,
            },
        })
    }

    fn from_trajectory(lambda: f64, c: f64, series: SeriesStart, traj: &Trajectory) -> Self {
        let mut grid = Vec::with_capacity(traj.len() + 1);
        let mut u = Vec::with_capacity(traj.len() + 1);
        let mut u_prime = Vec::with_capacity(traj.len() + 1);
        grid.push(0.0);
        u.push(c);
        u_prime.push(0.0);
        for i in 0..traj.len() {
            grid.push(traj.s[i]);
            u.push(traj.y[i][0]);
            u_prime.push(traj.y[i][1]);
        }
        let r_lambda = if lambda > 0.0 {
            (lambda * c * c * (c * c).exp()).powf(-0.5)
        } else {
            f64::INFINITY
        };
        RadialSolution {
            lambda,
            c,
            r_lambda,
            grid,
            u,
            u_prime,
            tail_amplitude: None,
            tail_rate: None,
            series,
        }
    }

    pub fn s_end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Index of the grid interval containing s.
    fn locate(&self, s: f64) -> usize {
        match self.grid.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        }
    }

    /// u(s): matched series below the start point, dense output above.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.series.s0 {
            return self.series.value(s);
        }
        let i = self.locate(s);
        ode::hermite(
            self.grid[i],
            self.grid[i + 1],
            self.u[i],
            self.u[i + 1],
            self.u_prime[i],
            self.u_prime[i + 1],
            s,
        )
    }

    /// u'(s).
    pub fn eval_deriv(&self, s: f64) -> f64 {
        if s <= self.series.s0 {
            return self.series.deriv(s);
        }
        let i = self.locate(s);
        let upp_i = self.u_second(i);
        let upp_j = self.u_second(i + 1);
        ode::hermite(
            self.grid[i],
            self.grid[i + 1],
            self.u_prime[i],
            self.u_prime[i + 1],
            upp_i,
            upp_j,
            s,
        )
    }

    /// u'' at a grid node, evaluated from the differential equation.
    fn u_second(&self, i: usize) -> f64 {
        let s = self.grid[i];
        if s == 0.0 {
            return self.series.second_at_origin();
        }
        let u = self.u[i];
        let up = self.u_prime[i];
        -coth(s) * up - self.lambda * u * (u * u).exp()
    }

    /// Start of the dense grid (series is used below this point).
    pub fn series_end(&self) -> f64 {
        self.series.s0
    }
}

#[inline]
fn coth(s: f64) -> f64 {
    1.0 / s.tanh()
}

fn ivp_options(config: &ShootingConfig, s0: f64) -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol: config.ivp_tol,
        abs_tol: 1e-300,
        max_step: 0.5,
        first_step: (s0 * 0.1).min(1e-3),
    }
}

/// Integrate one initial-value trajectory and classify it.
///
/// `lambda = 0` is admitted (the nonlinearity switches off and u stays at c),
/// which gives integrator sanity tests an exact reference.
pub fn integrate_ivp(
    lambda: f64,
    c: f64,
    config: &ShootingConfig,
) -> Result<(RadialSolution, ShotOutcome)> {
    config.validate()?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("peak height c must be > 0, got {c}")));
    }
    if c * c > MAX_C_SQUARED {
        return Err(Error::Domain(format!(
            "c = {c} overflows e^{{u^2}} in double precision (c^2 > {MAX_C_SQUARED}); a log-space fallback would be required"
        )));
    }

    let series = SeriesStart::new(lambda, c, config.series_start);
    let y0 = [series.value(series.s0), series.deriv(series.s0)];
    let rhs = move |s: f64, y: &[f64; 2]| -> [f64; 2] {
        [y[1], -coth(s) * y[1] - lambda * y[0] * (y[0] * y[0]).exp()]
    };
    let event = |_s: f64, y: &[f64; 2]| y[0];
    let traj = ode::integrate_adaptive(
        &rhs,
        series.s0,
        y0,
        config.s_max,
        &ivp_options(config, series.s0),
        Some(&event),
    )?;

    let sol = RadialSolution::from_trajectory(lambda, c, series, &traj);
    let outcome = match traj.event_s {
        Some(s_cross) => ShotOutcome::CrossedZero { s_cross },
        None => classify_decay(&sol, lambda, (config.classify_at, config.s_max))?,
    };
    Ok((sol, outcome))
}

/// Classify the decay of a positive trajectory from the mean of u'/u over a
/// window. The two linearized rates straddle -1/2 strictly for lambda < 1/4,
/// so the threshold needs no tunable margin; at lambda = 1/4 they merge and
/// a degeneracy error is raised instead.
pub fn classify_decay(
    sol: &RadialSolution,
    lambda: f64,
    window: (f64, f64),
) -> Result<ShotOutcome> {
    decay_rates(lambda)?;
    let (s_lo, s_hi) = window;
    if !(s_lo < s_hi) {
        return Err(Error::Domain(format!("bad classification window ({s_lo}, {s_hi})")));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..sol.grid.len() {
        let s = sol.grid[i];
        if s < s_lo || s > s_hi {
            continue;
        }
        if sol.u[i] <= 0.0 {
            return Err(Error::Domain(format!(
                "classification window contains nonpositive u at s = {s}"
            )));
        }
        sum += sol.u_prime[i] / sol.u[i];
        n += 1;
    }
    if n < 2 {
        return Err(Error::Domain(format!(
            "classification window ({s_lo}, {s_hi}) holds fewer than 2 grid points"
        )));
    }
    let rate = sum / n as f64;
    if rate < -0.5 {
        Ok(ShotOutcome::FastDecay {
            rate,
            tail_amplitude: None,
        })
    } else {
        Ok(ShotOutcome::SlowDecay { rate })
    }
}

/// Least-squares fit ln u = ln A - nu s over `window`; returns (A, slope).
pub fn tail_fit(sol: &RadialSolution, window: (f64, f64)) -> Result<(f64, f64, f64)> {
    let (s_lo, s_hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..sol.grid.len() {
        let s = sol.grid[i];
        if s < s_lo || s > s_hi {
            continue;
        }
        if sol.u[i] <= 0.0 {
            return Err(Error::Domain(format!("tail window contains nonpositive u at s = {s}")));
        }
        xs.push(s);
        ys.push(sol.u[i].ln());
    }
    if xs.len() < 8 {
        return Err(Error::Domain(format!(
            "tail window ({s_lo}, {s_hi}) holds {} points; need at least 8",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy * sxx - sx * sxy) / det;
    let max_resid = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok((intercept.exp(), slope, max_resid))
}

/// Default tail-fit window: the last stretch of the grid, clear of both the
/// core and the final node.
pub fn default_tail_window(sol: &RadialSolution) -> (f64, f64) {
    let s_end = sol.s_end();
    let s_hi = s_end - 1.0;
    let s_lo = (s_hi - 12.0).max(8.0_f64.min(0.5 * s_hi));
    (s_lo, s_hi)
}

/// Amplitude A of the fast tail u ~ A e^{-nu s}.
///
/// The fit residual gates quality: above 1e-3 the window is either
/// contaminated by the subcritical mode or still inside the core.
pub fn tail_amplitude(sol: &RadialSolution, lambda: f64) -> Result<f64> {
    tail_amplitude_in(sol, lambda, default_tail_window(sol))
}

/// [`tail_amplitude`] with an explicit window.
pub fn tail_amplitude_in(sol: &RadialSolution, lambda: f64, window: (f64, f64)) -> Result<f64> {
    let (fast, _slow) = decay_rates(lambda)?;
    let (amp, slope, max_resid) = tail_fit(sol, window)?;
    if max_resid > 1e-3 {
        return Err(Error::Quality(format!(
            "tail fit residual {max_resid:.3e} exceeds 1e-3 on window ({}, {})",
            window.0, window.1
        )));
    }
    if slope > -0.5 {
        return Err(Error::Quality(format!(
            "tail slope {slope:.6} is not on the fast branch (expected near {fast:.6})"
        )));
    }
    Ok(amp)
}

/// Result of pinning lambda*(c).
pub struct Shot {
    pub lambda_star: f64,
    pub solution: RadialSolution,
}

enum Side {
    Below, // slow decay: lambda below lambda*
    Above, // crossed zero: lambda above lambda*
}

fn classify_side(lambda: f64, c: f64, config: &ShootingConfig) -> Result<Side> {
    let (_, outcome) = integrate_ivp(lambda, c, config)?;
    Ok(match outcome {
        ShotOutcome::CrossedZero { .. } => Side::Above,
        ShotOutcome::SlowDecay { .. } => Side::Below,
        // An exactly-balanced trajectory still decays fast at the window;
        // fold it into the upper side so bisection keeps contracting.
        ShotOutcome::FastDecay { .. } => Side::Above,
    })
}

/// Bisection for lambda*(c) alone (no solution construction).
pub fn lambda_star(c: f64, config: &ShootingConfig) -> Result<f64> {
    let (lo, hi) = bracket_lambda(c, config)?;
    bisect_lambda(c, lo, hi, config).map(|(lo, hi)| 0.5 * (lo + hi))
}

fn bracket_lambda(c: f64, config: &ShootingConfig) -> Result<(f64, f64)> {
    const N: usize = 9;
    let lo = 1e-6;
    let hi = 0.25 - 1e-6;
    let mut sides = Vec::with_capacity(N);
    for i in 0..N {
        let lam = lo + (hi - lo) * i as f64 / (N - 1) as f64;
        sides.push((lam, classify_side(lam, c, config)?));
    }
    // the map must look like Below...Below Above...Above
    let mut first_above = None;
    for (i, (lam, side)) in sides.iter().enumerate() {
        match side {
            Side::Above => {
                if first_above.is_none() {
                    first_above = Some(i);
                }
            }
            Side::Below => {
                if first_above.is_some() {
                    return Err(Error::Ambiguous {
                        msg: format!(
                            "classification is not monotone in lambda at c = {c}; slow decay reappeared at lambda = {lam}"
                        ),
                        roots: sides.iter().map(|(l, _)| *l).collect(),
                    });
                }
            }
        }
    }
    match first_above {
        None => Err(Error::Bracket(format!(
            "no zero crossing up to lambda = {hi} at c = {c}; endpoints classify (slow, slow)"
        ))),
        Some(0) => Err(Error::Bracket(format!(
            "already crossing at lambda = {lo} at c = {c}; endpoints classify (crossed, crossed)"
        ))),
        Some(i) => Ok((sides[i - 1].0, sides[i].0)),
    }
}

fn bisect_lambda(c: f64, mut lo: f64, mut hi: f64, config: &ShootingConfig) -> Result<(f64, f64)> {
    while hi - lo > config.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify_side(mid, c, config)? {
            Side::Below => lo = mid,
            Side::Above => hi = mid,
        }
    }
    Ok((lo, hi))
}

/// Shoot in lambda at fixed peak height c: bisection between crossing and
/// slow-decay trajectories down to `bisect_tol`, then construction of the
/// admissible solution at the midpoint.
///
/// The returned grid is truncated where the two bracket-endpoint
/// trajectories separate by more than 1e-6 relative, i.e. where the
/// subcritical contamination becomes visible; beyond that point the fitted
/// exponential tail represents the solution.
pub fn shoot_lambda(c: f64, config: &ShootingConfig) -> Result<Shot> {
    config.validate()?;
    let (lo0, hi0) = bracket_lambda(c, config)?;
    let (lo, hi) = bisect_lambda(c, lo0, hi0, config)?;
    // Polishing the bracket toward the f64 resolution of lambda costs a few
    // extra shots and pushes the point where the subcritical mode surfaces
    // further out, which lengthens the trustworthy part of the grid.
    let polish = ShootingConfig {
        bisect_tol: (64.0 * f64::EPSILON * lo.abs()).max(1e-17),
        ..config.clone()
    };
    let (lo, hi) = bisect_lambda(c, lo, hi, &polish)?;
    // The slow-side endpoint is the reported shot: it stays positive on the
    // whole range and its residual contamination bends the tail upward, so
    // the hairline lower decay envelope is never undercut by solver noise.
    let lambda = lo;

    let (sol_lo, _) = integrate_ivp(lo, c, config)?;
    let (sol_hi, _) = integrate_ivp(hi, c, config)?;

    let s_trust = trusted_range(&sol_lo, &sol_hi, &sol_lo);
    if s_trust < 12.0 {
        return Err(Error::Numerical(format!(
            "bracket trajectories at c = {c} separate already at s = {s_trust:.2}; tighten bisect_tol"
        )));
    }
    let mut sol = truncate_solution(sol_lo, s_trust);

    let (amp, slope, _resid) = tail_fit(&sol, default_tail_window(&sol))?;
    sol.tail_amplitude = Some(amp);
    sol.tail_rate = Some(slope);
    Ok(Shot {
        lambda_star: lambda,
        solution: sol,
    })
}

/// Largest s where the bracket-endpoint trajectories still agree to 1e-4
/// relative, measured on the midpoint grid. Beyond this point the stored
/// samples would be contaminated; every downstream consumer needs far less
/// than 1e-4 there because the trajectory weights decay exponentially.
fn trusted_range(lo: &RadialSolution, hi: &RadialSolution, mid: &RadialSolution) -> f64 {
    let end = lo.s_end().min(hi.s_end()).min(mid.s_end());
    let mut s_trust = 0.0;
    for (i, &s) in mid.grid.iter().enumerate() {
        if s > end {
            break;
        }
        let u_mid = mid.u[i];
        if u_mid <= 0.0 {
            break;
        }
        let du = (lo.eval(s) - hi.eval(s)).abs();
        if du > 1e-4 * u_mid {
            break;
        }
        s_trust = s;
    }
    s_trust
}

fn truncate_solution(mut sol: RadialSolution, s_trust: f64) -> RadialSolution {
    let keep = sol.grid.iter().take_while(|&&s| s <= s_trust).count();
    sol.grid.truncate(keep);
    sol.u.truncate(keep);
    sol.u_prime.truncate(keep);
    sol
}

/// Find the admissible solution with a prescribed lambda by an outer
/// root-find of lambda*(c) = lambda in c (Illinois variant of regula falsi,
/// seeded at c = lambda^{-1/2}).
pub fn solve_for_lambda(lambda: f64, config: &ShootingConfig) -> Result<RadialSolution> {
    config.validate()?;
    if !(lambda > 0.0 && lambda < 0.25) {
        return Err(Error::Domain(format!(
            "solve_for_lambda needs lambda in (0, 1/4), got {lambda}"
        )));
    }
    let c_seed = lambda.powf(-0.5).min(0.99 * MAX_C_SQUARED.sqrt());

    // Expand a bracket [c_lo, c_hi] with lambda*(c_lo) > lambda > lambda*(c_hi).
    // lambda*(c) is decreasing in c for the admissible branch.
    let mut c_lo = c_seed;
    let mut g_lo = lambda_star(c_lo, config)? - lambda;
    let mut c_hi = c_lo;
    let mut g_hi = g_lo;
    let mut tries = 0;
    while g_lo < 0.0 {
        c_hi = c_lo;
        g_hi = g_lo;
        c_lo *= 0.7;
        g_lo = lambda_star(c_lo, config)? - lambda;
        tries += 1;
        if tries > 40 || c_lo < 1e-3 {
            return Err(Error::Bracket(format!(
                "could not bracket c for lambda = {lambda} (last c = {c_lo})"
            )));
        }
    }
    while g_hi > 0.0 {
        c_hi *= 1.4;
        if c_hi * c_hi > MAX_C_SQUARED {
            return Err(Error::Bracket(format!(
                "could not bracket c for lambda = {lambda} below the overflow cap"
            )));
        }
        g_hi = lambda_star(c_hi, config)? - lambda;
        tries += 1;
        if tries > 60 {
            return Err(Error::Bracket(format!(
                "could not bracket c for lambda = {lambda}"
            )));
        }
    }
    if g_lo < g_hi {
        return Err(Error::Ambiguous {
            msg: format!("lambda*(c) is not decreasing between c = {c_lo} and c = {c_hi}"),
            roots: vec![c_lo, c_hi],
        });
    }

    // Illinois iteration on g(c) = lambda*(c) - lambda.
    let target = (10.0 * config.bisect_tol).max(1e-14);
    let mut c_best = c_lo;
    let mut g_best = g_lo;
    for _ in 0..80 {
        let c_new = (c_lo * g_hi - c_hi * g_lo) / (g_hi - g_lo);
        let c_new = if !(c_new > c_lo.min(c_hi) && c_new < c_lo.max(c_hi)) {
            0.5 * (c_lo + c_hi)
        } else {
            c_new
        };
        let g_new = lambda_star(c_new, config)? - lambda;
        if g_new.abs() < g_best.abs() {
            c_best = c_new;
            g_best = g_new;
        }
        if g_new.abs() <= target || (c_hi - c_lo).abs() < 1e-13 * c_seed {
            break;
        }
        if (g_new > 0.0) == (g_lo > 0.0) {
            c_lo = c_new;
            g_lo = g_new;
            g_hi *= 0.5; // Illinois damping keeps the bracket moving
        } else {
            c_hi = c_new;
            g_hi = g_new;
            g_lo *= 0.5;
        }
    }
    if g_best.abs() > 100.0 * config.bisect_tol {
        return Err(Error::Numerical(format!(
            "outer solve stalled: |lambda*(c) - lambda| = {:.3e} at c = {c_best}",
            g_best.abs()
        )));
    }

    let shot = shoot_lambda(c_best, config)?;
    Ok(shot.solution)
}
