use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("numeric domain error: {0}")]
    Numeric(String),

    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("requested order {requested} exceeds configured jet order {available}")]
    OrderTooLarge { requested: usize, available: usize },

    #[error("invalid inter-arrival law: {0}")]
    InvalidLaw(String),

    #[error("invalid disorder law: {0}")]
    InvalidDisorder(String),

    #[error("system size {n} exceeds tabulation horizon {n_max}")]
    HorizonExceeded { n: usize, n_max: usize },

    #[error("disorder sequence has {len} charges, need {n}")]
    ShortDisorder { len: usize, n: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("oracle limited to n <= {max}, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("contact law capped at n <= {cap}, got {n}")]
    ContactLawCap { n: usize, cap: usize },

    #[error("bisection did not converge: {0}")]
    NoConvergence(String),

    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
