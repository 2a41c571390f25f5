use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("index {index} out of range 0..={max}")]
    Index { index: usize, max: usize },

    #[error("sequence {sequence} is not strictly increasing at index {index}: {prev} >= {value}")]
    NotIncreasing {
        sequence: &'static str,
        index: usize,
        prev: f64,
        value: f64,
    },

    #[error("{sequence}({index}) = {value} is not contained in Y = [{lo}, {hi}]")]
    Containment {
        sequence: &'static str,
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("declared limit {limit} of {sequence} is not beyond {sequence}({depth}) = {value}")]
    LimitConsistency {
        sequence: &'static str,
        depth: usize,
        value: f64,
        limit: f64,
    },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error(
        "W_{n}({x}, {y}) = {value} leaves Y = [{lo}, {hi}]; enlarge the Y interval so every W_n maps into it"
    )]
    RangeViolation {
        n: usize,
        x: f64,
        y: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} is not finite ({v})")))
    }
}
