use thiserror::Error;

/// Errors produced by the circulant extension library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("half-period N must be at least 1")]
    ZeroHalfPeriod,

    #[error("degree {degree} is too large for half-period N = {half_period}")]
    DegreeTooLarge { degree: usize, half_period: usize },

    #[error("index {index} outside the admissible range |k| <= {limit}")]
    IndexOutOfRange { index: i64, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value at grid point zeta_{index} is not positive ({value:e})")]
    NonPositive { index: i64, value: f64 },

    #[error("matrix value at grid point zeta_{index} is singular")]
    Singular { index: i64 },

    #[error("matrix value at grid point zeta_{index} is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { index: i64, min_eig: f64 },

    #[error("matrix value at grid point zeta_{index} is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { index: i64, asymmetry: f64 },

    #[error("imaginary residue {residue:e} exceeds the real-symmetry tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("dense materialization of size {size} exceeds the cap {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("covariance data is infeasible: {reason}")]
    Infeasible {
        reason: String,
        /// Boundary direction in the real dual parametrization, when one was found.
        direction: Vec<f64>,
    },

    #[error("solver stopped without a certificate after {iterations} iterations (gradient norm {gradient_norm:e})")]
    Indeterminate {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error(
        "pseudo-polynomial vanishes on the unit circle; banded factorization has no outer factor"
    )]
    FactorizationOnCircle,

    #[error("pseudo-polynomial is positive on the grid but not on the whole unit circle")]
    DiscreteOnly,

    #[error("factorization residual {residual:e} exceeds the acceptance gate")]
    FactorizationResidual { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("optimization terminated on the boundary of the feasible cone: {0}")]
    Boundary(String),
}

pub type Result<T> = std::result::Result<T, Error>;
