use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid ball: {0}")]
    InvalidBall(String),

    #[error("invalid ball family: {0}")]
    InvalidFamily(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("grid functions live on different lattices")]
    LatticeMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grid function: {0}")]
    InvalidGridFunction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rejected instance: {0}")]
    RejectedInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
