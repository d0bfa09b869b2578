use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("leaf {0} is frozen and cannot be flipped")]
    FrozenFlip(usize),

    #[error("flip decoding requires a CRC (crc_len >= 1)")]
    MissingCrc,

    #[error("critical set index {0} is not a non-frozen position")]
    NotSubset(usize),

    #[error("mean LLR must be non-negative, got {0}")]
    NegativeMean(f64),

    #[error("threshold must be finite and non-negative, got {0}")]
    InvalidThreshold(f64),

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid decoder configuration: {0}")]
    InvalidDecoder(String),

    #[error("cannot parse {0}")]
    Parse(String),

    #[error("malformed code descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
