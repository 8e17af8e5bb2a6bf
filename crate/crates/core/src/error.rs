use std::fmt;

use thiserror::Error;

/// A syntax error in formula text, located by byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: expected ", self.offset)?;
        match self.expected.as_slice() {
            [] => write!(f, "nothing")?,
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        match &self.found {
            Some(tok) => write!(f, ", found `{tok}`"),
            None => write!(f, ", found end of input"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] ParseError),

    #[error("empty input")]
    EmptyInput,

    #[error("unbalanced parentheses: {0}")]
    UnbalancedParens(String),

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable index {index} out of range for {len} variables")]
    VariableOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration guard: {vars} variables exceeds the limit of {limit}")]
    EnumerationGuard { vars: usize, limit: usize },

    #[error("clause blow-up guard: more than {cap} clauses")]
    ClauseBlowUp { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no rules")]
    NoRules,

    #[error("empty clause set")]
    EmptyClauseSet,

    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        Error::AtLine {
            line,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping line annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_guard(&self) -> bool {
        matches!(self.root(), Error::EnumerationGuard { .. } | Error::ClauseBlowUp { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
