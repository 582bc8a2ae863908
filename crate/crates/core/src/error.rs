use thiserror::Error;

/// Errors produced by the numerical kernels and parsers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown builtin symbol `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}` is missing required parameter `{param}`")]
    MissingParam { name: String, param: String },
    #[error("symbol evaluation failed at ({l1}, {l2}): {msg}")]
    SymbolEval { l1: f64, l2: f64, msg: String },
    #[error("grid size {n} cannot resolve support radius {radius} (need power-of-two n > 2*radius)")]
    GridTooSmall { n: usize, radius: i64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
