//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Wavevector inputs that cannot form a valid echo geometry.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A parameter outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The fixed-step integrator guard `dt * max(|Omega|, |Delta|) <= 0.1`
    /// was violated.
    #[error(
        "step size {dt:.3e} s violates dt*max(|Omega|,|Delta|) <= 0.1 \
         (max rate {max_rate:.3e} rad/s); use dt <= {suggested:.3e} s"
    )]
    StepSize {
        dt: f64,
        max_rate: f64,
        suggested: f64,
    },

    /// A grid, medium, or schedule configuration that violates a named rule.
    #[error("configuration error: {0}")]
    Config(String),

    /// Detection-window errors (empty, inverted, or overlapping the input).
    #[error("invalid window: {0}")]
    Window(String),

    /// Sequence-file syntax or semantic errors, with location.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown sweep parameter path `{0}`")]
    UnknownParameter(String),

    #[error("coupling calibration failed: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
