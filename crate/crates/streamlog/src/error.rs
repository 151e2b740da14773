//! Crate-wide error type. Parse errors carry a position; semantic errors
//! carry enough context to act on (offending rule, predicate, or witness).

use crate::depgraph::CycleWitness;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("{0}")]
    Format(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("program is not stratified: {0}")]
    Stratification(StratificationError),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("translation refused: {0}")]
    Translate(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratificationError {
    pub witness: CycleWitness,
}

impl fmt::Display for StratificationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cycle {} passes through the non-monotone dependency {} -> {}",
            self.witness.cycle.join(" -> "),
            self.witness.strict_edge.0,
            self.witness.strict_edge.1
        )
    }
}

impl From<crate::stream::FormatError> for Error {
    fn from(e: crate::stream::FormatError) -> Self {
        Error::Format(e.0)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
