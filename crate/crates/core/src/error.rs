use thiserror::Error;

/// Errors raised by the model, analysis, calibration and serialization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An operation received an argument outside its mathematical domain.
    #[error("domain error: `{arg}` = {value} ({reason})")]
    Domain {
        arg: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A parameter or configuration value violates its declared range.
    #[error("out-of-range value for `{key}`: {reason}")]
    OutOfRange { key: String, reason: String },

    /// A configuration is structurally unusable (bad horizon, empty grid, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed JSON or CSV text.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A config object carried a key that the format does not define.
    #[error("unknown key `{key}` at line {line}, column {column}")]
    UnknownKey {
        key: String,
        line: usize,
        column: usize,
    },

    /// The same mechanism or key was given twice.
    #[error("duplicate entry `{0}`")]
    Duplicate(String),

    /// A scenario id did not resolve to a built-in scenario.
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid domain index {0} (expected 0..3)")]
    DomainIndex(usize),
}

impl Error {
    pub(crate) fn out_of_range(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than a
    /// failure during computation.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
