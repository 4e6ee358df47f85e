use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("parse error at row {row}, column {col}: {msg}")]
    ParseCell { row: usize, col: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("subspace iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("oracle matrix is rank deficient: singular value {index} is {value:e} (largest {largest:e})")]
    RankDeficient {
        index: usize,
        value: f64,
        largest: f64,
    },

    #[error("community {community} is neither dense nor sparse under the given thresholds")]
    AmbiguousCommunity { community: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
