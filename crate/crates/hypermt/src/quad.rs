//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7/15 pair drives a globally adaptive subdivision: the interval with the
//! largest error estimate is split until the summed estimate meets the
//! requested tolerance. Integrable endpoint singularities (logarithmic ones
//! in particular) are handled by the subdivision concentrating panels there.
//! Semi-infinite integrals are summed over dyadic panels with a divergence
//! detector on the tail.

use crate::error::{Error, Result};

/// Kronrod abscissae for the 7-15 pair (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_964,
    0.063_092_092_629_978_553_291,
    0.104_790_010_322_250_183_84,
    0.140_653_259_715_525_918_75,
    0.169_004_726_639_267_902_83,
    0.190_350_578_064_785_409_91,
    0.204_432_940_075_298_892_41,
    0.209_482_141_084_727_828_01,
];

/// Gauss weights of the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], center).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_27,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_95,
    0.417_959_183_673_469_387_76,
];

/// One Gauss-Kronrod 7/15 application on [a, b].
/// Returns (kronrod value, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];

    let mut fv = [0.0f64; 7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1 + f2;
        fv[j] = sum;
        kronrod += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for (j, &s) in fv.iter().enumerate() {
        // |f1 - mean| + |f2 - mean| >= |f1 + f2 - 2 mean|; the cheaper bound
        // is enough for an error heuristic.
        resasc += WGK[j] * (s - 2.0 * mean).abs();
    }

    let value = kronrod * half;
    let raw_err = ((kronrod - gauss) * half).abs();
    let resasc = resasc * half.abs();

    // QUADPACK-style rescaling of the raw difference.
    let mut err = raw_err;
    if resasc != 0.0 && raw_err != 0.0 {
        let scale = (200.0 * raw_err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let resabs = resabs * half.abs();
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive integration of `f` over the finite interval [a, b].
///
/// Stops when the summed error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`. Returns (value, error estimate).
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_PANELS: usize = 4096;
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(f, a, b);
    if !v.is_finite() {
        return Err(Error::Numerical(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let mut panels = vec![Panel {
        a,
        b,
        value: v,
        error: e,
    }];
    let mut total_v = v;
    let mut total_e = e;
    let mut total_abs = v.abs();

    // Roundoff floor: below this the error estimate is pure noise.
    let tol = |total_v: f64, total_abs: f64| {
        abs_tol
            .max(rel_tol * total_v.abs())
            .max(200.0 * f64::EPSILON * total_abs)
    };

    while total_e > tol(total_v, total_abs) {
        if panels.len() >= MAX_PANELS {
            return Err(Error::Tolerance {
                msg: format!("quadrature on [{a}, {b}] stalled after {MAX_PANELS} panels"),
                achieved: total_e,
                requested: abs_tol.max(rel_tol * total_v.abs()),
            });
        }
        // Split the worst panel. Ties break on the left endpoint so the
        // subdivision order is deterministic.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| {
                p.error
                    .partial_cmp(&q.error)
                    .unwrap()
                    .then(q.a.partial_cmp(&p.a).unwrap())
            })
            .expect("panel list nonempty");
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution: keep its estimate.
            panels.push(Panel {
                error: 0.0,
                ..worst
            });
            total_e -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Numerical(format!(
                "integrand not finite near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total_v += v1 + v2 - worst.value;
        total_e += e1 + e2 - worst.error;
        total_abs += v1.abs() + v2.abs() - worst.value.abs();
        panels.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        panels.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    Ok((total_v, total_e))
}

/// Adaptive integration of `f` over [a, infinity).
///
/// The range is covered by [a, a+1] followed by dyadic panels doubling in
/// width. Summation stops once two consecutive panel contributions fall
/// below a small fraction of the tolerance; a tail that stops decaying is
/// reported as a domain error.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_DOUBLINGS: usize = 120;
    let mut total_v = 0.0;
    let mut total_e = 0.0;
    let mut lo = a;
    let mut hi = a + 1.0;
    let mut small_streak = 0usize;
    let mut growth_streak = 0usize;
    let mut prev_mag = f64::INFINITY;

    for _ in 0..MAX_DOUBLINGS {
        let (v, e) = integrate(f, lo, hi, abs_tol * 0.125, rel_tol * 0.125)?;
        total_v += v;
        total_e += e;
        let mag = v.abs();

        if mag >= prev_mag && mag > abs_tol.max(rel_tol * total_v.abs()) {
            growth_streak += 1;
            if growth_streak >= 8 {
                return Err(Error::Domain(format!(
                    "tail of integrand does not decay (panel [{lo}, {hi}] contributes {mag:e})"
                )));
            }
        } else {
            growth_streak = 0;
        }

        if mag < 0.05 * abs_tol.max(rel_tol * total_v.abs()) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok((total_v, total_e + mag));
            }
        } else {
            small_streak = 0;
        }

        prev_mag = mag;
        lo = hi;
        hi = a + 2.0 * (hi - a);
    }
    Err(Error::Tolerance {
        msg: format!("semi-infinite quadrature from {a} did not converge"),
        achieved: prev_mag,
        requested: abs_tol,
    })
}
