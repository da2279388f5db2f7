//! Numerical laboratory for positive radial solutions of the
//! Moser-Trudinger equation on the Poincaré disk,
//!
//! ```text
//!   -Delta_H u = lambda u e^{u^2},   u > 0,   u -> 0 at infinity,
//! ```
//!
//! with 0 < lambda < 1/4. Solutions are found by shooting on the geodesic
//! radial ODE; the crate then confronts them with the blow-up profiles,
//! energy expansions, decay envelopes and Pohozaev identities that govern
//! the lambda -> 0 limit.

// negated comparisons are used on purpose: `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature tables carry their full published digits
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod fmt;
pub mod functionals;
pub mod geometry;
pub mod lab;
pub mod ode;
pub mod profiles;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
