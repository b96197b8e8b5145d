use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation point excluded: {0}")]
    ExcludedPoint(String),

    #[error(
        "quadrature did not converge: best estimate {value:e} with error estimate {error:e} after {panels} panels"
    )]
    QuadratureNonConvergence {
        value: f64,
        error: f64,
        panels: usize,
    },

    #[error("singular linear system: {0}")]
    SingularMatrix(String),

    #[error("regime contract violated: {0}")]
    Regime(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("series did not converge: {0}")]
    SeriesNonConvergence(String),

    #[error("positivity search failed: {0}")]
    SearchFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
