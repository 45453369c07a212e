use std::fmt;

use crate::syntax::Pos;

/// A syntax error with a 1-based source location.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { line: pos.line, col: pos.col, message: message.into() }
    }
}

/// Which bounded resource ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resource {
    ClosureNodes,
    ArenaNodes,
    ProgramStates,
    Enumeration,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::ClosureNodes => "formula closure",
            Resource::ArenaNodes => "game arena",
            Resource::ProgramStates => "program state space",
            Resource::Enumeration => "enumeration budget",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    /// Malformed or inconsistent input (unknown state, arity mismatch, ...).
    #[error("input error: {0}")]
    Input(String),
    #[error("{resource} exceeded the cap of {cap}: {detail}")]
    Resource { resource: Resource, cap: usize, detail: String },
    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
