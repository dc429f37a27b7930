use thiserror::Error;

/// Errors raised by tensor, sketch and experiment operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet of size {alphabet_size}")]
    LetterOutOfRange { letter: u64, alphabet_size: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("word of length {len} exceeds truncation depth {depth}")]
    WordTooLong { len: usize, depth: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("candidate set needs {needed} words, above the cap of {cap}")]
    CandidateOverflow { needed: u128, cap: usize },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("degenerate training data: {0}")]
    DegenerateData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
