use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} relative to norm {norm:e})")]
    NotHermitian { asymmetry: f64, norm: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("quaternionic structure violated: {0}")]
    Structure(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("resource cap exceeded: {what} needs about {estimate} but cap is {cap}")]
    ResourceCap {
        what: &'static str,
        estimate: u64,
        cap: u64,
    },

    #[error("shell contains no nonzero lattice point")]
    EmptyShell,

    #[error("codebook is empty")]
    EmptyCodebook,

    #[error("eigenvalue pairing violated: relative gap {gap:e}")]
    Pairing { gap: f64 },

    #[error("slope fit needs at least 2 usable points, got {usable}")]
    InsufficientPoints { usable: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}
