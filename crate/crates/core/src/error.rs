use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient moments: need {required}, got {available}")]
    InsufficientMoments { required: usize, available: usize },

    #[error("insufficient response entries: need {required}, got {available}")]
    InsufficientResponse { required: usize, available: usize },

    /// Factorization pivot `index` (1-based) of an order-`order` matrix is not positive.
    #[error("matrix of order {order} is not positive definite (pivot {index} failed)")]
    NotPositiveDefinite { order: usize, index: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("Hankel matrix of order {order} is singular")]
    SingularHankel { order: usize },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("recovered atoms {left} and {right} coincide within tolerance")]
    DegenerateSpectrum { left: f64, right: f64 },

    #[error("degenerate quantity: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} disagree (discrepancy {discrepancy:e})")]
    CrossCheck {
        what: &'static str,
        discrepancy: f64,
    },
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InsufficientMoments { .. } => "insufficient-moments",
            Error::InsufficientResponse { .. } => "insufficient-response-entries",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::SingularMatrix => "singular-matrix",
            Error::SingularHankel { .. } => "singular-hankel",
            Error::NoConvergence { .. } => "no-convergence",
            Error::DegenerateSpectrum { .. } => "degenerate-spectrum",
            Error::Degenerate(_) => "degenerate",
            Error::InvalidInput(_) => "invalid-input",
            Error::CrossCheck { .. } => "cross-check-failed",
        }
    }
}

/// Non-fatal observation attached to a result (conditioning, ignored input, degeneracy).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
        }
    }
}
