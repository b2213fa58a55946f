//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model parameter that must be strictly positive (or finite) is not.
    #[error("non-positive or non-finite parameter: {0}")]
    NonPositiveParameter(String),

    /// The position grid truncates the Gaussian tail above threshold.
    #[error("grid too narrow: exp(-alpha0 x_max^2) = {tail:.3e} >= {threshold:.3e}")]
    GridTooNarrow { tail: f64, threshold: f64 },

    /// A Fock cutoff does not capture the requested state or operator.
    #[error("Fock cutoff too small: {0}")]
    CutoffTooSmall(String),

    /// A matrix expected to be Hermitian is not, within tolerance.
    #[error("non-Hermitian input: {0}")]
    NonHermitianInput(String),

    /// An operation received a wavefunction in the wrong representation.
    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    /// A state that must be normalized is not, within tolerance.
    #[error("normalization error: {0}")]
    NormalizationError(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The cutoff ladder never produced two consecutive agreeing results.
    #[error("not converged: {0}")]
    NotConverged(String),

    /// The environment branch vectors are not parallel, so no scalar
    /// relating factor exists (the state is entangled at this time).
    #[error("branch vectors not parallel: defect = {defect:.3e} >= {threshold:.3e}")]
    NotParallel { defect: f64, threshold: f64 },

    /// Zero coupling: the decoherence time is infinite.
    #[error("zero coupling: {0}")]
    ZeroCoupling(String),

    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Linear algebra backend failure.
    #[error("linear algebra error: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
