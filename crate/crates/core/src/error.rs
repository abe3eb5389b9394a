use thiserror::Error;

use crate::grid::Representation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} representation, got {found}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },

    #[error("operands live on different grids or representations")]
    GridMismatch,

    #[error("amplitude count {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("cannot normalize a zero field")]
    ZeroNorm,

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid packet: {0}")]
    InvalidPacket(String),

    #[error("operator is not Hermitian (max |H_ij - conj(H_ji)| = {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("product distribution has zero total rate (disjoint supports); conditional is undefined")]
    UndefinedConditional,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
