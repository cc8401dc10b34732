use thiserror::Error;

#[derive(Debug, Error)]
pub enum GleeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: weighted or multi-column edge rows are not supported")]
    WeightedInput { line: usize },

    #[error("edge list is empty")]
    EmptyInput,

    #[error("invalid dimension {d} for a graph with {n} nodes")]
    Dimension { d: usize, n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: {0}")]
    Mismatch(String),

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("malformed embedding file: {0}")]
    EmbeddingFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GleeError>;
