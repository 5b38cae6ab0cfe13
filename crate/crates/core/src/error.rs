use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("parameter `{param}` out of domain for `{family}`")]
    ParamOutOfDomain { family: String, param: String },
    #[error("operator `{op}` expects {expected} argument(s), got {got}")]
    Arity { op: String, expected: usize, got: usize },
    #[error("atom universe mismatch: {0}")]
    AtomUniverseMismatch(String),
    #[error("unknown logic `{0}`")]
    UnknownLogic(String),
    #[error("axiom `{0}` is not rank-1")]
    NotRankOne(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("operator `{op}` is not interpreted over functor {functor}")]
    FunctorMismatch { op: String, functor: String },
    #[error("proposition p{0} has no valuation")]
    UndefinedProp(u32),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("malformed value: {0}")]
    InvalidValue(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("one-step set is not decisive over the algebra: {0}")]
    NotDecisive(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
