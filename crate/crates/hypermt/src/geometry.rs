//! Poincaré-disk primitives shared by every other module.
//!
//! The model is the open unit disk with metric (2/(1-|x|^2))^2 times the
//! Euclidean one. All functions here are pure and total on their stated
//! domains; NaN inputs and near-boundary points are rejected eagerly rather
//! than clamped, since silent clamping would corrupt decay fits downstream.

use crate::error::{Error, Result};

/// Points closer to the boundary than this are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// A point of the open unit disk, in Euclidean coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    pub x1: f64,
    pub x2: f64,
}

impl DiskPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !x1.is_finite() || !x2.is_finite() {
            return Err(Error::Domain("disk point must be finite".into()));
        }
        let norm2 = x1 * x1 + x2 * x2;
        if norm2 >= (1.0 - BOUNDARY_MARGIN) * (1.0 - BOUNDARY_MARGIN) {
            return Err(Error::Domain(format!(
                "|x| = {} is not inside the open unit disk",
                norm2.sqrt()
            )));
        }
        Ok(DiskPoint { x1, x2 })
    }

    pub fn origin() -> Self {
        DiskPoint { x1: 0.0, x2: 0.0 }
    }

    pub fn norm2(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }
}

/// Geodesic distance from the origin; bijective with the Euclidean radius
/// through r = tanh(s/2).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GeodesicCoord(pub f64);

/// s = ln((1+r)/(1-r)) for a Euclidean radius r in [0,1).
pub fn geodesic_radius(r: f64) -> Result<GeodesicCoord> {
    if !r.is_finite() || !(0.0..1.0).contains(&r) || r > 1.0 - BOUNDARY_MARGIN {
        return Err(Error::Domain(format!(
            "euclidean radius {r} outside [0, 1 - {BOUNDARY_MARGIN:e}]"
        )));
    }
    // ln((1+r)/(1-r)) = 2 atanh(r); ln_1p keeps precision near r = 0.
    Ok(GeodesicCoord(2.0 * r.atanh()))
}

/// r = tanh(s/2) for a geodesic distance s >= 0.
pub fn euclidean_radius(s: GeodesicCoord) -> Result<f64> {
    let s = s.0;
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!("geodesic distance {s} negative")));
    }
    Ok((0.5 * s).tanh())
}

/// The Möbius transformation T_a exchanging a and the origin:
/// T_a(x) = (|x-a|^2 a - (1-|a|^2)(x-a)) / (1 - 2 x.a + |x|^2 |a|^2).
pub fn mobius(a: DiskPoint, x: DiskPoint) -> DiskPoint {
    let dx1 = x.x1 - a.x1;
    let dx2 = x.x2 - a.x2;
    let d2 = dx1 * dx1 + dx2 * dx2;
    let a2 = a.norm2();
    let x2 = x.norm2();
    let dot = x.x1 * a.x1 + x.x2 * a.x2;
    let denom = 1.0 - 2.0 * dot + x2 * a2;
    let f = 1.0 - a2;
    DiskPoint {
        x1: (d2 * a.x1 - f * dx1) / denom,
        x2: (d2 * a.x2 - f * dx2) / denom,
    }
}

/// Geodesic distance between two points, rho(x,y) = rho(T_y(x)).
pub fn hyperbolic_distance(x: DiskPoint, y: DiskPoint) -> Result<GeodesicCoord> {
    let t = mobius(y, x);
    // The image of two interior points stays interior; guard anyway so a
    // rounding excursion surfaces as an error instead of a NaN.
    let n = t.norm().min(1.0 - BOUNDARY_MARGIN);
    geodesic_radius(n)
}

/// Conformal factor (2/(1-r^2))^2 and the polar volume weight sinh(rho(r)).
pub fn metric_weights(r: f64) -> Result<(f64, f64)> {
    if !r.is_finite() || !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("euclidean radius {r} outside [0,1)")));
    }
    let conformal = (2.0 / (1.0 - r * r)).powi(2);
    // sinh(rho(r)) = 2r/(1-r^2), the hyperbolic polar identity.
    let volume = 2.0 * r / (1.0 - r * r);
    Ok((conformal, volume))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic pseudo-random stream for the bulk invariant checks.
    pub struct SplitMix64(pub u64);

    impl SplitMix64 {
        pub fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        /// Uniform in [0, 1).
        pub fn next_f64(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        /// A disk point with radius at most rmax.
        pub fn disk_point(&mut self, rmax: f64) -> DiskPoint {
            let r = rmax * self.next_f64().sqrt();
            let th = std::f64::consts::TAU * self.next_f64();
            DiskPoint {
                x1: r * th.cos(),
                x2: r * th.sin(),
            }
        }
    }

    #[test]
    fn geodesic_radius_examples() {
        assert_eq!(geodesic_radius(0.0).unwrap().0, 0.0);
        assert!((geodesic_radius(0.5).unwrap().0 - 3.0f64.ln()).abs() < 1e-15);
        let r = 1.0f64.tanh();
        assert!((geodesic_radius(r).unwrap().0 - 2.0).abs() < 1e-14);
        assert!(geodesic_radius(1.0).is_err());
        assert!(geodesic_radius(-0.1).is_err());
        assert!(geodesic_radius(f64::NAN).is_err());
    }

    #[test]
    fn euclidean_radius_examples() {
        assert_eq!(euclidean_radius(GeodesicCoord(0.0)).unwrap(), 0.0);
        assert!((euclidean_radius(GeodesicCoord(2.0)).unwrap() - 1.0f64.tanh()).abs() < 1e-15);
        assert!(euclidean_radius(GeodesicCoord(-1.0)).is_err());
        let r = 0.999;
        let s = geodesic_radius(r).unwrap();
        assert!((euclidean_radius(s).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn coordinate_round_trip() {
        let mut k = 0;
        loop {
            let r = 1.0 - 10f64.powi(-k);
            let r = if k == 0 { 0.0 } else { r };
            if r >= 1.0 - 1e-8 {
                break;
            }
            let s = geodesic_radius(r).unwrap();
            let back = euclidean_radius(s).unwrap();
            assert!((back - r).abs() < 1e-12, "round trip failed at r = {r}");
            k += 1;
        }
        // dense scan
        for i in 0..=1000 {
            let r = (i as f64 / 1000.0) * (1.0 - 1e-8);
            let back = euclidean_radius(geodesic_radius(r).unwrap()).unwrap();
            assert!((back - r).abs() < 1e-12);
        }
    }

    #[test]
    fn mobius_examples() {
        let a = DiskPoint::new(0.3, 0.4).unwrap();
        let t = mobius(a, DiskPoint::origin());
        assert!((t.x1 - a.x1).abs() < 1e-15 && (t.x2 - a.x2).abs() < 1e-15);

        let z = mobius(a, a);
        assert!(z.norm() < 1e-15);

        let x = DiskPoint::new(0.2, -0.5).unwrap();
        let m = mobius(DiskPoint::origin(), x);
        assert!((m.x1 + x.x1).abs() < 1e-15 && (m.x2 + x.x2).abs() < 1e-15);
    }

    #[test]
    fn mobius_involution_bulk() {
        let mut rng = SplitMix64(0x5eed);
        for _ in 0..10_000 {
            let a = rng.disk_point(0.95);
            let x = rng.disk_point(0.95);
            let y = mobius(a, mobius(a, x));
            assert!(
                (y.x1 - x.x1).abs() < 1e-12 && (y.x2 - x.x2).abs() < 1e-12,
                "involution failed at a=({},{}) x=({},{})",
                a.x1,
                a.x2,
                x.x1,
                x.x2
            );
        }
    }

    #[test]
    fn mobius_isometry_bulk() {
        let mut rng = SplitMix64(0xd15c);
        for _ in 0..2_000 {
            let a = rng.disk_point(0.9);
            let x = rng.disk_point(0.9);
            let y = rng.disk_point(0.9);
            let d0 = hyperbolic_distance(x, y).unwrap().0;
            let d1 = hyperbolic_distance(mobius(a, x), mobius(a, y)).unwrap().0;
            assert!(
                (d0 - d1).abs() < 1e-10,
                "isometry failed: {d0} vs {d1} (a=({},{}))",
                a.x1,
                a.x2
            );
        }
    }

    #[test]
    fn distance_examples() {
        let x = DiskPoint::new(0.7, 0.0).unwrap();
        assert!(hyperbolic_distance(x, x).unwrap().0 < 1e-12);

        let a = DiskPoint::new(0.5, 0.0).unwrap();
        let d = hyperbolic_distance(DiskPoint::origin(), a).unwrap().0;
        assert!((d - geodesic_radius(0.5).unwrap().0).abs() < 1e-14);

        let p = DiskPoint::new(0.1, 0.2).unwrap();
        let q = DiskPoint::new(-0.3, 0.4).unwrap();
        let dpq = hyperbolic_distance(p, q).unwrap().0;
        let dqp = hyperbolic_distance(q, p).unwrap().0;
        assert!((dpq - dqp).abs() < 1e-12);
    }

    #[test]
    fn metric_weight_examples() {
        let (c0, v0) = metric_weights(0.0).unwrap();
        assert_eq!(c0, 4.0);
        assert_eq!(v0, 0.0);

        let (c5, v5) = metric_weights(0.5).unwrap();
        assert!((c5 - 64.0 / 9.0).abs() < 1e-14);
        assert!((v5 - 4.0 / 3.0).abs() < 1e-14);
        assert!(metric_weights(1.0).is_err());
    }

    #[test]
    fn sinh_rho_identity() {
        for i in 0..1000 {
            let r = (i as f64 + 0.5) / 1000.0 * 0.999;
            let s = geodesic_radius(r).unwrap().0;
            let (_, v) = metric_weights(r).unwrap();
            assert!(
                (s.sinh() - v).abs() <= 1e-12 * (1.0 + v),
                "sinh(rho) mismatch at r = {r}"
            );
        }
    }
}
