use thiserror::Error;

/// Errors raised anywhere in the emulator stack.
#[derive(Debug, Error)]
pub enum QiteError {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} limited to {max} qubits, got {n}")]
    SizeCap {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("invalid rotation generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("operator is not hermitian")]
    NonHermitian,

    #[error("degenerate normalization c = {c:.6e} (imaginary-time step too large for this term)")]
    DegenerateNormalization { c: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("term {0} has no symmetry link")]
    MissingSymmetryLink(usize),

    #[error("reference state has no definite site-inversion eigenvalue (overlap {0:.3e})")]
    BrokenInversionSymmetry(f64),

    #[error("state norm vanished during imaginary-time evolution")]
    VanishingNorm,

    #[error("energy scan table is empty")]
    EmptyTable,

    #[error("every grid point failed for term {term}")]
    AllGridPointsFailed { term: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QiteError>;
