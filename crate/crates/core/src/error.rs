use thiserror::Error;

use crate::logic::ConstName;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Aut { line: usize, message: String },

    #[error("formula parse error at offset {offset}: {message}")]
    Formula { offset: usize, message: String },

    #[error("declaration file, line {line}: {message}")]
    DeclFile { line: usize, message: String },

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("unknown process `{0}`")]
    UnknownProcess(String),

    #[error("unbound constant {0}")]
    UnboundConstant(ConstName),

    #[error("variable X{0} in a closed formula")]
    OpenFormula(usize),

    #[error("variable X{0} is not in the index set")]
    UnknownIndex(usize),

    #[error("constant {constant} is not below level {level}")]
    LevelViolation { constant: ConstName, level: usize },

    #[error("malformed nested system: {0}")]
    Nesting(String),

    #[error("index set does not match the process set")]
    IndexMismatch,

    #[error("relation over {found} processes, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid kind `{0}`")]
    InvalidKind(String),

    #[error("nesting depth must be at least 1, got {0}")]
    NestingDepth(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
