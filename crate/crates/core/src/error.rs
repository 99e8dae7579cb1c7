use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A block header violates one of the consensus invariants.
    #[error("rejected header: {0}")]
    InvalidHeader(String),

    /// Code parameters (n, w_c, w_r, ...) are inconsistent.
    #[error("invalid code parameters: {0}")]
    Parameter(String),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The null space of H is {0}.
    #[error("degenerate code: parity-check matrix has full column rank")]
    DegenerateCode,

    #[error("code dimension {dimension} exceeds enumeration limit {limit}")]
    Capacity { dimension: usize, limit: usize },

    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("success probability is zero; expected first-success cycle is unbounded")]
    UndefinedMean,

    #[error("need at least {required} samples, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed chain record at line {line}: {reason}")]
    ChainFormat { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
