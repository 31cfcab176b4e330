//! Error type shared by the whole crate.
//!
//! Diagnostic payloads are carried as `f64` regardless of the working scalar
//! so the enum stays non-generic and cheap to pass around.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure constants violate antisymmetry at ({i},{j},{k})")]
    Antisymmetry { i: usize, j: usize, k: usize },

    #[error("Jacobi residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    JacobiViolation { residual: f64, tol: f64 },

    #[error("unknown catalog algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("element is not skew-symmetric: {verdict}")]
    NotSkewSymmetric { verdict: String },

    #[error("eigenvalue computation failed to converge")]
    EigenFailure,

    #[error("Gram matrix is not exactly symmetric at ({i},{j})")]
    AsymmetricGram { i: usize, j: usize },

    #[error("scalar product is degenerate")]
    DegenerateProduct,

    #[error("no Haar sampler available for algebra `{0}`")]
    NoSamplerAvailable(String),

    #[error("map is not equivariant at the basepoint: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NonEquivariantMap { residual: f64, tol: f64 },

    #[error("two-form is degenerate on the tangent space (smallest singular value {sigma_min:.3e})")]
    DegenerateForm { sigma_min: f64 },

    #[error("vector does not lie in a single eigenblock (off-block mass {mass:.3e})")]
    BlockMembershipViolation { mass: f64 },

    #[error("argument has a kernel component of mass {mass:.3e}; the decomposition cannot absorb it")]
    ImageEscape { mass: f64 },

    #[error("bases or basepoints of the supplied structures do not match")]
    BasisMismatch,

    #[error("map provides no exact linearization")]
    NoLinearization,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid algebra file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
