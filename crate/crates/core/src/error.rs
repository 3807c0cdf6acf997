use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical kernel and the algebraic constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {0:?} vs {1:?}")]
    FieldMismatch(crate::numkit::Field, crate::numkit::Field),

    #[error("matrix is singular (pivot {pivot:.3e} below threshold)")]
    SingularMatrix { pivot: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operators {i} and {j} do not commute (commutator norm {norm:.3e})")]
    NonCommuting { i: usize, j: usize, norm: f64 },

    #[error("could not separate characters (best idempotent residual {residual:.3e})")]
    CharacterSeparationFailure { residual: f64 },

    #[error("element is not invertible")]
    NotInvertible,

    #[error("matrix is not in the algebra (projection residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("branch cut at angle {angle} meets the spectrum")]
    RayHitsSpectrum { angle: f64 },

    #[error("element has no real logarithm in the algebra")]
    NoRealLog,

    #[error("operation requires a real algebra")]
    ComplexFieldError,

    #[error("algebra is not cyclic or its dimension differs from the ambient dimension")]
    NotCyclicAlgebra,

    #[error("vectors are linearly dependent (determinant {det:.3e})")]
    DependentVectors { det: f64 },

    #[error("every operator in the tuple is scalar")]
    AllScalar,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown gallery entry `{0}`")]
    UnknownGallery(String),
}
