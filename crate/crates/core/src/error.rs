use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "quadrature did not converge on [{a}, {b}] after {evaluations} evaluations \
         (error estimate {error_estimate:e})"
    )]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        evaluations: usize,
        error_estimate: f64,
    },

    /// The void probability underflows; switch to the log-space PMF path.
    #[error("void probability underflows (log p0 = {log_p0})")]
    Underflow { log_p0: f64 },

    #[error("{censored} of {total} runs censored below the observation radius (limit 1%)")]
    ExcessiveCensoring { censored: usize, total: usize },

    #[error("curve covers [0, {curve_max}] but samples reach {sample_max}")]
    CurveCoverage { curve_max: f64, sample_max: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
