use thiserror::Error;

/// Largest dimension for which a dense `2^n` buffer may be allocated.
pub const MAX_DENSE_DIM: usize = 30;

/// Largest dimension for which a full density vector is materialized.
pub const MAX_FULL_DIM: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range [1, 2^{dim}]")]
    Range { index: u64, dim: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("capacity error: {what} needs 2^{dim} entries, limit is n <= {limit}")]
    Capacity {
        what: &'static str,
        dim: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("degenerate normalizer: Z = {0}")]
    DegenerateNormalizer(f64),

    #[error("empty data: at least one observation is required")]
    EmptyData,

    #[error("insufficient data: leave-one-out needs at least 2 observations, got {0}")]
    InsufficientData(u64),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, dim: usize, limit: usize) -> Self {
        Error::Capacity { what, dim, limit }
    }

    pub(crate) fn check_dense(what: &'static str, dim: usize) -> Result<()> {
        if dim > MAX_DENSE_DIM {
            Err(Error::capacity(what, dim, MAX_DENSE_DIM))
        } else {
            Ok(())
        }
    }

    pub(crate) fn dim_mismatch(expected: usize, got: usize) -> Self {
        Error::Shape(format!("dimension mismatch: expected n = {expected}, got n = {got}"))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
