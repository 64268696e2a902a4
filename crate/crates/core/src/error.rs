use std::io;

use thiserror::Error;

/// Errors raised by the test pipeline and its supporting modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence length {0} is odd; spectral tests require an even length")]
    OddLength(usize),

    #[error("stream holds {available} bits but {required} were requested")]
    InsufficientBits { required: usize, available: usize },

    #[error("malformed bit file: {0}")]
    Format(String),

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("empty sample")]
    EmptySample,

    #[error("empty p-value set")]
    EmptySet,

    #[error("{got} sequences supplied, at least {min} needed for the asymptotic KS law")]
    TooFewSequences { got: usize, min: usize },

    #[error("bad generator parameters: {0}")]
    BadParameters(String),

    #[error("frequency bin {j} outside 1..{half} for n = {n}")]
    BadBin { j: usize, n: usize, half: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
