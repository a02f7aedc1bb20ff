use thiserror::Error;

/// Errors raised by the geometric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternionic dimension must be at least 1")]
    ZeroDimension,

    #[error("complex structure index {0} out of range (expected 1, 2 or 3)")]
    StructureIndex(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("singular point: |grad Re f| = {grad_norm:e} below {singular_tol:e}")]
    SingularPoint { grad_norm: f64, singular_tol: f64 },

    #[error("projection did not converge after {iterations} iterations (|f| = {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("adapted frame degenerate after {attempts} draws")]
    FrameDegeneracy { attempts: usize },

    #[error("gauge parameters ({a}, {b}) are not on the unit circle")]
    NonUnitGauge { a: f64, b: f64 },

    #[error("invalid finite-difference configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Infrastructure failures, as opposed to failed identities.
    pub fn is_infrastructure(&self) -> bool {
        matches!(
            self,
            Error::SingularPoint { .. } | Error::NonConvergence { .. } | Error::FrameDegeneracy { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
