use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("codomain/domain mismatch: {0}")]
    CodMismatch(String),
    #[error("block mismatch: {0}")]
    BlockMismatch(String),
    #[error("invalid route at summand {summand}: {reason}")]
    InvalidRoute { summand: usize, reason: String },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("box mismatch: {0}")]
    BoxMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ill-formed element: {0}")]
    IllFormedElem(String),
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(String),
    #[error("domain too large: {size} elements exceeds bound {bound}")]
    DomainTooLarge { size: usize, bound: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("ill-formed start: {0}")]
    IllFormedStart(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
