//! Embedded Dormand-Prince 5(4) integration for two-component radial systems.
//!
//! The solver stores state and derivative at every accepted node, which gives
//! a C^1 cubic-Hermite dense output used for event location, resampling and
//! grid quadrature. A fixed-step driver shares the same stage arithmetic so
//! order-of-convergence tests exercise the production tableau.

use crate::error::{Error, Result};

pub type State = [f64; 2];

/// Butcher tableau coefficients of the Dormand-Prince 5(4) pair.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
/// Difference between the 5th- and the embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[inline]
fn axpy(y: &State, h: f64, parts: &[(f64, &State)]) -> State {
    let mut out = *y;
    for &(c, k) in parts {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One Dormand-Prince step from (s, y) with derivative k1 = f(s, y).
/// Returns (y_next, k_next = f(s+h, y_next), error_estimate).
fn dp_step<F: Fn(f64, &State) -> State>(f: &F, s: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
    let k2 = f(s + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(s + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(s + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        s + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        s + h,
        &axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_next = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(s + h, &y_next);
    let err = [
        h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
        h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
    ];
    (y_next, k7, err)
}

/// Dense trajectory: state and derivative at each accepted node.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub y: Vec<State>,
    pub dy: Vec<State>,
    /// Location where the event function crossed zero, if it did.
    pub event_s: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn last_s(&self) -> f64 {
        *self.s.last().expect("trajectory nonempty")
    }

    fn locate(&self, s: f64) -> usize {
        match self
            .s
            .binary_search_by(|probe| probe.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.s.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.s.len() - 2),
        }
    }

    /// Cubic-Hermite evaluation of component `c` at `s` (clamped to range).
    pub fn eval(&self, s: f64, c: usize) -> f64 {
        let i = self.locate(s);
        hermite(
            self.s[i],
            self.s[i + 1],
            self.y[i][c],
            self.y[i + 1][c],
            self.dy[i][c],
            self.dy[i + 1][c],
            s,
        )
    }

    /// Derivative of the Hermite interpolant of component `c` at `s`.
    pub fn eval_deriv(&self, s: f64, c: usize) -> f64 {
        let i = self.locate(s);
        hermite_deriv(
            self.s[i],
            self.s[i + 1],
            self.y[i][c],
            self.y[i + 1][c],
            self.dy[i][c],
            self.dy[i + 1][c],
            s,
        )
    }
}

/// Cubic Hermite interpolation on [s0, s1].
#[allow(clippy::too_many_arguments)]
pub fn hermite(s0: f64, s1: f64, y0: f64, y1: f64, d0: f64, d1: f64, s: f64) -> f64 {
    let h = s1 - s0;
    if h == 0.0 {
        return y0;
    }
    let t = (s - s0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

#[allow(clippy::too_many_arguments)]
pub fn hermite_deriv(s0: f64, s1: f64, y0: f64, y1: f64, d0: f64, d1: f64, s: f64) -> f64 {
    let h = s1 - s0;
    if h == 0.0 {
        return d0;
    }
    let t = (s - s0) / h;
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * y0
        + (3.0 * t2 - 4.0 * t + 1.0) * h * d0
        + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * h * d1)
        / h
}

/// Options for the adaptive driver.
#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    /// Relative tolerance per component.
    pub rel_tol: f64,
    /// Absolute tolerance floor per component.
    pub abs_tol: f64,
    /// Hard cap on the step size (also bounds the output-grid spacing).
    pub max_step: f64,
    /// Initial step.
    pub first_step: f64,
}

/// Integrate ds/dt = f from `s0` to `s_end`, recording every accepted node.
///
/// If `event` is given, integration stops at the first zero crossing of
/// `event(s, y)` (located on the dense output to near machine precision) and
/// the crossing node becomes the final grid point.
pub fn integrate_adaptive<F, G>(
    f: &F,
    s0: f64,
    y0: State,
    s_end: f64,
    opts: &AdaptiveOptions,
    event: Option<&G>,
) -> Result<Trajectory>
where
    F: Fn(f64, &State) -> State,
    G: Fn(f64, &State) -> f64,
{
    let mut s = s0;
    let mut y = y0;
    let mut k1 = f(s, &y);
    let mut h = opts.first_step.min(opts.max_step).min(s_end - s0);
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "bad integration range [{s0}, {s_end}] or first step {h}"
        )));
    }

    let mut traj = Trajectory {
        s: vec![s],
        y: vec![y],
        dy: vec![k1],
        event_s: None,
    };
    let mut ev_prev = event.map(|g| g(s, &y));

    const SAFETY: f64 = 0.9;
    const MAX_GROW: f64 = 5.0;
    const MIN_SHRINK: f64 = 0.2;
    const MAX_STEPS: usize = 2_000_000;

    for _ in 0..MAX_STEPS {
        if s >= s_end {
            return Ok(traj);
        }
        h = h.min(s_end - s);
        let (y_next, k_next, err) = dp_step(f, s, &y, &k1, h);
        if !(y_next[0].is_finite() && y_next[1].is_finite()) {
            return Err(Error::Numerical(format!(
                "state became non-finite near s = {s:.6e}"
            )));
        }
        let scale0 = opts.abs_tol + opts.rel_tol * y[0].abs().max(y_next[0].abs());
        let scale1 = opts.abs_tol + opts.rel_tol * y[1].abs().max(y_next[1].abs());
        let e = ((err[0] / scale0).powi(2) + (err[1] / scale1).powi(2)).sqrt() / 2f64.sqrt();

        if e <= 1.0 {
            // accepted
            s += h;
            y = y_next;
            k1 = k_next;
            traj.s.push(s);
            traj.y.push(y);
            traj.dy.push(k1);

            if let (Some(g), Some(prev)) = (event, ev_prev) {
                let ev = g(s, &y);
                if prev > 0.0 && ev <= 0.0 {
                    let s_cross = locate_event(&traj, g);
                    truncate_at(&mut traj, s_cross, f);
                    traj.event_s = Some(s_cross);
                    return Ok(traj);
                }
                ev_prev = Some(ev);
            }
        }

        let factor = if e == 0.0 {
            MAX_GROW
        } else {
            (SAFETY * e.powf(-0.2)).clamp(MIN_SHRINK, MAX_GROW)
        };
        h = (h * factor).min(opts.max_step);
        if h < 16.0 * f64::EPSILON * s.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "step size underflow at s = {s:.6e} (h = {h:.3e})"
            )));
        }
    }
    Err(Error::Numerical("step budget exhausted".into()))
}

/// Bisection for the event zero on the last Hermite segment.
fn locate_event<G: Fn(f64, &State) -> f64>(traj: &Trajectory, g: &G) -> f64 {
    let n = traj.len();
    let (mut lo, mut hi) = (traj.s[n - 2], traj.s[n - 1]);
    let at = |s: f64| {
        let y = [traj.eval(s, 0), traj.eval(s, 1)];
        g(s, &y)
    };
    let mut flo = at(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = at(mid);
        if (flo > 0.0) == (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cut the trajectory at s_cut, evaluating the final node on the dense output.
fn truncate_at<F: Fn(f64, &State) -> State>(traj: &mut Trajectory, s_cut: f64, f: &F) {
    let y_cut = [traj.eval(s_cut, 0), traj.eval(s_cut, 1)];
    while traj.len() > 1 && *traj.s.last().unwrap() >= s_cut {
        traj.s.pop();
        traj.y.pop();
        traj.dy.pop();
    }
    let dy_cut = f(s_cut, &y_cut);
    traj.s.push(s_cut);
    traj.y.push(y_cut);
    traj.dy.push(dy_cut);
}

/// Fixed-step driver over the same tableau; used by order-of-convergence
/// tests. Steps are h except possibly the last one.
pub fn integrate_fixed<F: Fn(f64, &State) -> State>(
    f: &F,
    s0: f64,
    y0: State,
    s_end: f64,
    h: f64,
) -> Result<State> {
    if !(h > 0.0) || s_end <= s0 {
        return Err(Error::Domain("fixed-step driver needs h > 0, s_end > s0".into()));
    }
    let mut s = s0;
    let mut y = y0;
    let mut k1 = f(s, &y);
    while s < s_end {
        let step = h.min(s_end - s);
        let (y_next, k_next, _) = dp_step(f, s, &y, &k1, step);
        s += step;
        y = y_next;
        k1 = k_next;
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at s = {s}")));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(tol: f64) -> AdaptiveOptions {
        AdaptiveOptions {
            rel_tol: tol,
            abs_tol: tol * 1e-3,
            max_step: 0.5,
            first_step: 1e-4,
        }
    }

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y, y(0) = 1, y'(0) = 0 -> y = cos t.
        let f = |_s: f64, y: &State| [y[1], -y[0]];
        let traj = integrate_adaptive(&f, 0.0, [1.0, 0.0], 10.0, &opts(1e-11), None::<&fn(f64, &State) -> f64>)
            .unwrap();
        let y_end = traj.y.last().unwrap();
        assert!((y_end[0] - 10.0f64.cos()).abs() < 1e-9);
        assert!((y_end[1] + 10.0f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_accuracy() {
        let f = |_s: f64, y: &State| [y[1], -y[0]];
        let traj = integrate_adaptive(&f, 0.0, [1.0, 0.0], 6.0, &opts(1e-11), None::<&fn(f64, &State) -> f64>)
            .unwrap();
        for i in 0..=60 {
            let s = i as f64 * 0.1;
            assert!((traj.eval(s, 0) - s.cos()).abs() < 1e-7);
            assert!((traj.eval_deriv(s, 0) + s.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn event_detection_on_decaying_cosine() {
        // y = cos t crosses zero at pi/2.
        let f = |_s: f64, y: &State| [y[1], -y[0]];
        let g = |_s: f64, y: &State| y[0];
        let traj =
            integrate_adaptive(&f, 0.0, [1.0, 0.0], 10.0, &opts(1e-12), Some(&g)).unwrap();
        let s_cross = traj.event_s.expect("crossing expected");
        assert!((s_cross - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(traj.last_s() <= s_cross + 1e-12);
    }

    #[test]
    fn fixed_step_shows_fifth_order() {
        let f = |_s: f64, y: &State| [y[1], -y[0]];
        let reference = [10.0f64.cos(), -10.0f64.sin()];
        let err = |h: f64| {
            let y = integrate_fixed(&f, 0.0, [1.0, 0.0], 10.0, h).unwrap();
            ((y[0] - reference[0]).powi(2) + (y[1] - reference[1]).powi(2)).sqrt()
        };
        let e1 = err(0.1);
        let e2 = err(0.05);
        let order = (e1 / e2).log2();
        assert!(
            (order - 5.0).abs() < 0.6,
            "observed order {order}, errors {e1:.3e}/{e2:.3e}"
        );
    }

    #[test]
    fn rejects_bad_range() {
        let f = |_s: f64, y: &State| [y[1], -y[0]];
        assert!(integrate_fixed(&f, 0.0, [1.0, 0.0], -1.0, 0.1).is_err());
    }
}
