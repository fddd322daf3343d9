use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular over GF(2) (rank {rank} < {n})")]
    Singular { rank: usize, n: usize },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid distribution: {0}")]
    InvalidDist(String),
    #[error("label map is not a bijection: {0}")]
    NotBijective(String),
    #[error("size budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid user input (as opposed to I/O).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
