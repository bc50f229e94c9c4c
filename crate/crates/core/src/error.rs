use thiserror::Error;

/// Errors raised by the numerical routines and the file-format readers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Weights that cannot be normalized into a probability distribution.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Coincident wavenumbers, duplicate pulse centers and similar
    /// configurations where a quantity is undefined.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// A value overflowed the representable floating-point range.
    #[error("range error: {0}")]
    Range(String),

    /// A correlation or R² was requested for a zero-variance input.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Malformed input file content.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by unreadable or malformed input files rather
    /// than by the numbers they contain.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_) | Error::Csv(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
