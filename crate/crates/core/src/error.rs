use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 4")]
    InvalidGridSize(usize),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("grid function contains non-finite values")]
    NonFinite,
    #[error("scale {scale} exceeds grid resolution n = {n} ({constraint})")]
    ScaleTooLarge { scale: u32, n: usize, constraint: &'static str },
    #[error("filter for j={j}, k={k}, iota={iota} does not fit the periodic grid")]
    FilterWraps { j: u32, k: i32, iota: i8 },
    #[error("unknown or inadmissible index: {0}")]
    UnknownIndex(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },
    #[error("iteration diverged at step {iteration}: residual {residual:e}")]
    Divergence { iteration: usize, residual: f64 },
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
