use thiserror::Error;

/// Everything that can go wrong when building or driving the operators in
/// this crate. Numerical *disagreement* is never an `Error`: verification
/// routines report residuals and let the caller judge them against a
/// tolerance profile. `Error` is reserved for inputs that make the requested
/// computation meaningless.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("Hilbert dimension must be at least 1")]
    ZeroDimension,

    /// The geometric moment sum has a vanishing denominator exactly when the
    /// index offset is a multiple of the dimension; the closed form does not
    /// apply there and the caller must use the degenerate value instead.
    #[error("index offset {offset} is a multiple of the dimension {dim}; the closed-form sum is singular there")]
    SingularOffset { offset: i64, dim: usize },

    #[error("scalar map produced a non-finite value at eigenvalue index {index}")]
    NonFiniteEigenvalueMap { index: usize },

    #[error("Bessel order {order} outside supported range |n| <= {max}")]
    OrderOutOfRange { order: i64, max: i64 },

    #[error("ring lattice needs at least 2 sites, got {sites}")]
    TooFewSites { sites: usize },

    #[error("coupling rate must be finite and positive, got {gamma}")]
    InvalidCoupling { gamma: f64 },

    #[error("propagation distance must be finite and non-negative, got {z_max}")]
    InvalidDistance { z_max: f64 },

    #[error("a propagation plan needs at least 2 samples, got {samples}")]
    TooFewSamples { samples: usize },

    #[error("integration step must be finite and positive, got {step}")]
    InvalidStep { step: f64 },

    #[error("integration step {step} exceeds the stability bound {max}")]
    StepTooLarge { step: f64, max: f64 },

    #[error("sample grid must be non-decreasing and start at 0")]
    InvalidGrid,

    #[error("initial field must have a non-zero norm")]
    ZeroField,

    #[error("tolerances must be finite and lie in (0, 1)")]
    InvalidTolerance,

    #[error("self test needs max dimension >= 2, got {max_dim}")]
    InvalidMaxDim { max_dim: usize },

    #[error("unknown propagation method {0:?}; expected spectral, bessel, folded, or ode")]
    UnknownMethod(String),
}

pub type Result<T> = std::result::Result<T, Error>;
