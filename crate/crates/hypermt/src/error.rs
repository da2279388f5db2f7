use thiserror::Error;

/// Errors produced by the numerical pipeline.
///
/// The CLI maps these onto its exit-code contract: `Usage`/`Domain` -> 2,
/// `Bracket`/`Ambiguous` -> 3, everything numerical -> 4.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain: {0}")]
    Domain(String),

    /// An adaptive routine failed to reach its tolerance.
    #[error("numerical: {msg} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Tolerance {
        msg: String,
        achieved: f64,
        requested: f64,
    },

    /// Step-size underflow or other integrator breakdown.
    #[error("numerical: {0}")]
    Numerical(String),

    /// No sign change found while bracketing a root.
    #[error("bracket: {0}")]
    Bracket(String),

    /// Root finding detected several candidate roots.
    #[error("ambiguous: {msg}; candidates {roots:?}")]
    Ambiguous { msg: String, roots: Vec<f64> },

    /// A query fell outside tabulated data.
    #[error("range: {0}")]
    Range(String),

    /// The two linearized decay rates coincide and the classifier cannot act.
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// A result did not meet its quality gate (e.g. a fit residual).
    #[error("quality: {0}")]
    Quality(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Range(_) => 2,
            Error::Bracket(_) | Error::Ambiguous { .. } => 3,
            Error::Tolerance { .. }
            | Error::Numerical(_)
            | Error::Degenerate(_)
            | Error::Quality(_) => 4,
        }
    }
}
