use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three families that callers (the CLI in particular)
/// treat differently: precondition refusals, consistency-check failures and
/// exceeded computation budgets. See [`Error::kind`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },

    #[error("duplicate column index {0}")]
    DuplicateIndex(usize),

    #[error("matrix parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown seed `{0}` (expected one of M, S, EH3, example_9_5)")]
    UnknownSeed(String),

    /// The doubling spectrum recursion only covers codes without codewords of
    /// weight 1, 2 or 3.
    #[error("input spectrum has {count} codewords of weight {weight}; the doubling recursion requires none of weight 1..=3")]
    LowWeightCodewords { weight: usize, count: String },

    #[error("dual doubling step requires an even half-length, got {0}")]
    OddHalfLength(usize),

    #[error("code has no doubling lineage usable by the recursion: {0}")]
    LineageAbsent(String),

    #[error("{what} requires {required} units of work, budget is {budget}")]
    BudgetExceeded {
        what: String,
        required: String,
        budget: String,
    },

    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Precondition,
    Consistency,
    Budget,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Inconsistent(_) => ErrorKind::Consistency,
            Error::BudgetExceeded { .. } => ErrorKind::Budget,
            _ => ErrorKind::Precondition,
        }
    }

    pub(crate) fn budget(what: impl Into<String>, required: impl ToString, budget: impl ToString) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            required: required.to_string(),
            budget: budget.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
