use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("malformed token `{token}` at position {position}")]
    MalformedToken { token: String, position: usize },
    #[error("expected exactly 3 pretzel columns, found {found}")]
    WrongArity { found: usize },
    #[error("unsupported notation `{0}`: only integer rational words and 3-column pretzels are accepted")]
    UnsupportedNotation(String),

    #[error("link is trivial (|p| <= 1) and has no minimal positive word")]
    TrivialLink,

    #[error("change vector has {vector} entries but the word has {word}")]
    Misaligned { vector: usize, word: usize },
    #[error("region {region} has {available} crossings, cannot change {requested}")]
    CountExceedsRegion {
        region: usize,
        available: u64,
        requested: u64,
    },
    #[error("diagram search exceeded the weight ceiling of {0}")]
    WeightCeilingExceeded(u64),
    #[error("diagram search exhausted every change vector without reaching an unlink")]
    InternalExhaustion,

    #[error("child {child} does not have fewer crossings than its parent {parent}")]
    DescentViolation { parent: String, child: String },

    #[error("pretzel {0} has all columns of absolute value >= 2")]
    IrreducibleHere(String),
    #[error("pretzel {0} must have odd positive columns")]
    NotOddPositive(String),
    #[error(
        "triviality of pretzel {0} cannot be decided: its determinant equals that of an unlink"
    )]
    Indeterminate(String),
    #[error("pretzel {0} does not match a supported parity pattern")]
    UnsupportedParityPattern(String),

    #[error("parameters {0} are outside the family domain")]
    OutOfDomain(String),
    #[error("family registry: {0}")]
    Registry(String),

    #[error("crossing number {n} outside the supported range {min}..={max}")]
    BudgetExceeded { n: u64, min: u64, max: u64 },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
