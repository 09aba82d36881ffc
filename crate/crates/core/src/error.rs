use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{msg} at {line}:{col}")]
    Syntax { msg: String, line: usize, col: usize },

    #[error("{inner} at {line}:{col}")]
    Located { inner: Box<Error>, line: usize, col: usize },

    #[error("unknown form `{0}`")]
    UnknownForm(String),

    #[error("arity mismatch in `{form}`: expected {expected}, found {found}")]
    Arity {
        form: String,
        expected: String,
        found: usize,
    },

    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },

    #[error("unbound variable `{0}`")]
    Unbound(String),

    #[error("type mismatch: {0}")]
    Type(String),

    /// A symbolic value reached a point that needs a concrete one.
    #[error("symbolic value encountered: {0}")]
    Symbolic(String),

    #[error("not enumerable: {0}")]
    NonEnumerable(String),

    #[error("invalid carrier declaration: {0}")]
    Carrier(String),

    #[error("malformed theory: {0}")]
    Theory(String),

    #[error("pair not ⊆ₒ-ordered: {0}")]
    NotOrdered(String),

    #[error("unknown spec `{0}`")]
    UnknownSpec(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
