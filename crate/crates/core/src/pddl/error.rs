use std::fmt;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PddlErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{name}` expects {expected} argument(s) but got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("unsupported requirement `{0}`")]
    UnsupportedRequirement(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("undeclared variable `?{0}`")]
    UndeclaredVariable(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("type hierarchy contains a cycle through `{0}`")]
    CyclicType(String),
    #[error("`{arg}` of type `{found}` does not fit parameter type `{expected}`")]
    TypeMismatch { arg: String, found: String, expected: String },
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("problem is for domain `{found}` but `{expected}` was supplied")]
    DomainMismatch { expected: String, found: String },
    #[error("timed literal at negative time {0}")]
    NegativeTime(String),
}

/// Error raised while reading or checking PDDL text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlError {
    pub kind: PddlErrorKind,
    pub pos: Option<Pos>,
}

impl PddlError {
    pub fn new(kind: PddlErrorKind, pos: Pos) -> Self {
        PddlError { kind, pos: Some(pos) }
    }

    pub fn bare(kind: PddlErrorKind) -> Self {
        PddlError { kind, pos: None }
    }
}

impl fmt::Display for PddlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{pos}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl std::error::Error for PddlError {}

pub type Result<T, E = PddlError> = std::result::Result<T, E>;
