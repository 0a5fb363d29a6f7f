use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "insufficient depth: modulus chain has {levels} scaling level(s), at least 2 are required"
    )]
    InsufficientDepth { levels: usize },

    #[error("prime {0} is not NTT-friendly for this ring degree")]
    NotNttFriendly(u64),

    #[error("too many values: {got} exceed the {capacity} available slots")]
    TooManyValues { got: usize, capacity: usize },

    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("level {level} outside the modulus chain (top level {top})")]
    LevelOutOfRange { level: usize, top: usize },

    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },

    #[error("scale mismatch: {left} vs {right}")]
    ScaleMismatch { left: f64, right: f64 },

    #[error("ciphertext has degree {0}; relinearize first")]
    RelinearizeFirst(usize),

    #[error("no relinearization key available")]
    MissingRelinKey,

    #[error("no Galois key for rotation step {0}")]
    MissingGaloisKey(i64),

    #[error("invalid rotation step {step} for {slots} slots")]
    InvalidRotation { step: i64, slots: usize },

    #[error("modulus chain exhausted: cannot rescale at level 0")]
    ChainExhausted,

    #[error("encoded coefficient {0:e} does not fit the supported integer range")]
    CoefficientOverflow(f64),

    #[error("malformed matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("layout mismatch: expected {expected}, found {found}")]
    LayoutMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("matrix of dimension {dim} exceeds slot capacity ({slots} slots)")]
    CapacityExceeded { dim: usize, slots: usize },

    #[error("sparsity {0} outside [0, 1]")]
    InvalidSparsity(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
