use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A syntax error in a net document, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// A well-formed document that does not describe a valid net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticError {
    /// Human-readable rule slot, e.g. `B | A=1`, when the error concerns one.
    pub slot: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(slot) = &self.slot {
            write!(f, "slot `{slot}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structure contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("structure is not a forest: `{0}` has more than one parent")]
    NotAForest(String),
    #[error("nets do not share the same structure")]
    IncompatibleStructure,
    #[error("rule table is incomplete: no rule for slot `{0}`")]
    IncompleteTable(String),
    #[error("probability {value} for slot `{slot}` is outside [0, 1]")]
    InvalidProbability { slot: String, value: f64 },
    #[error("outcome has {got} values, structure has {expected} variables")]
    OutcomeMismatch { expected: usize, got: usize },
    #[error("outcomes do not form a swap pair (they differ on {0} variables)")]
    NotASwapPair(usize),
    #[error("{what} is too large for exhaustive enumeration ({size} > {limit})")]
    TooLargeForOracle {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("too many variables for an exhaustive scan ({size} > {limit})")]
    TooLarge { size: usize, limit: usize },
    #[error("population structures cannot be merged: {0}")]
    StructureMismatch(String),
    #[error("cannot aggregate an empty population")]
    EmptyPopulation,
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("{0}")]
    Semantic(SemanticError),
}

impl Error {
    /// Whether the error comes from a size guard rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::TooLargeForOracle { .. } | Error::TooLarge { .. })
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl From<SemanticError> for Error {
    fn from(e: SemanticError) -> Self {
        Error::Semantic(e)
    }
}
