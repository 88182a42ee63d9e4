use thiserror::Error;

/// Everything that can go wrong while building, evolving or checking a state.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient `{matrix}[{row}][{col}]` is not finite at t = {t}")]
    Evaluation {
        matrix: &'static str,
        row: usize,
        col: usize,
        t: f64,
    },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("integration diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("state has a singular magnification matrix")]
    SingularState,

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("flux split undefined: {0} is not symmetric (residual {1:.3e})")]
    SplitUndefined(&'static str, f64),

    #[error("grid too small: boundary mass {mass:.3e} exceeds {limit:.1e}")]
    GridTooSmall { mass: f64, limit: f64 },

    #[error("split-step propagation requires n = 1 and b(t) = 0")]
    UnsupportedCoupling,

    #[error("Riccati integration left the Siegel half-space at step {step} (t = {t})")]
    RiccatiBlowUp { step: usize, t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
