use std::fmt;

/// Errors produced by estimator construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    Parameter(String),
    /// Requested subset enumeration exceeds the configured cap.
    Capacity { requested: u128, cap: u128 },
    /// Input data and configuration disagree (lengths, dimensions, indices).
    Consistency(String),
    /// Non-finite values where finite reals are required.
    Domain(String),
    /// A numeric routine failed (bracket loss, singular system).
    Numeric(String),
    /// I/O failure while reading or writing artifacts.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::Capacity { requested, cap } => {
                write!(f, "capacity error: C(N,n) = {requested} exceeds cap {cap}")
            }
            Error::Consistency(msg) => write!(f, "consistency error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
