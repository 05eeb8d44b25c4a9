use thiserror::Error;

/// Errors produced by matrix, subspace, certificate, and optimizer operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M*| entry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix is zero (or has zero Hilbert-Schmidt norm)")]
    ZeroMatrix,

    #[error("exponent must be > 1, got {0}")]
    BadExponent(f64),

    #[error("input is not normalized: {what} = {value} (expected {expected})")]
    NotNormalized {
        what: &'static str,
        value: f64,
        expected: f64,
    },

    #[error("directions are not orthogonal: |Tr[x y*]| = {0:.3e}")]
    NotOrthogonal(f64),

    #[error("basis list is empty or spans the zero subspace")]
    EmptyBasis,

    #[error("subspace has no directions")]
    EmptySubspace,

    #[error("point is not in the subspace (projection residual {0:.3e})")]
    NotInSubspace(f64),

    #[error("scalar field mismatch between operands")]
    FieldMismatch,

    #[error("matrix tagged real has nonzero imaginary part {0:.3e}")]
    NotReal(f64),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("x x* and x y* do not commute (max commutator entry {0:.3e}); closed form inapplicable")]
    NotCommuting(f64),

    #[error("matrix is not full rank (rank {rank} < {dim})")]
    NotFullRank { rank: usize, dim: usize },

    #[error("spectrum is degenerate (min eigenvalue gap {0:.3e}); check skipped")]
    DegenerateSpectrum(f64),

    #[error("no anticommuting family of size {requested} in dimension {m}: limit is {limit}")]
    DimensionTooSmall {
        m: usize,
        requested: usize,
        limit: usize,
    },

    #[error("dimension {0} is odd; construction needs an even dimension")]
    OddDimension(usize),

    #[error("invalid orthogonal family: {0}")]
    InvalidFamily(String),

    #[error("invalid input format: {0}")]
    InvalidFormat(String),

    #[error("unknown tolerance name {0:?}")]
    UnknownTolerance(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
