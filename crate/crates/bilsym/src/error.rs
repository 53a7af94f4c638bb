use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("representation mismatch: expected {expected}, found {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("cost guard exceeded: {0}")]
    CostGuard(String),
    #[error("symbol must be x-independent")]
    XDependent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
