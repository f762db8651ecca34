//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid membership function ({a}, {b}, {c}): breakpoints must satisfy a <= b <= c")]
    InvalidMf { a: f64, b: f64, c: f64 },

    #[error("membership function ({a}, {b}, {c}) of term '{term}' lies outside the universe [{lo}, {hi}]")]
    MfOutsideUniverse {
        term: String,
        a: f64,
        b: f64,
        c: f64,
        lo: f64,
        hi: f64,
    },

    #[error("input {value} for variable '{variable}' is outside its universe [{lo}, {hi}]")]
    OutOfUniverse {
        variable: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("rule '{rule}' references variable '{variable}', which is not declared")]
    UnknownVariable { rule: String, variable: String },

    #[error(
        "rule '{rule}' references term '{term}' of variable '{variable}', which is not declared"
    )]
    UnknownTerm {
        rule: String,
        variable: String,
        term: String,
    },

    #[error("no rule fired: every output activation is zero, refusing to report a silent zero risk level")]
    NoRuleFired,

    #[error("defuzzification resolution must be at least 101 samples, got {0}")]
    ResolutionTooCoarse(usize),

    #[error("degree {value} for '{what}' is outside [0, 1]")]
    DegreeOutOfRange { what: String, value: f64 },

    #[error("certainty rule has no antecedents")]
    EmptyAntecedents,

    #[error("no belief available for antecedent ({variable}, {term})")]
    MissingBelief { variable: String, term: String },

    #[error(
        "invalid triangular fuzzy number ({l}, {m}, {u}): components must satisfy 0 < l <= m <= u"
    )]
    InvalidTfn { l: f64, m: f64, u: f64 },

    #[error("comparison matrix error: {0}")]
    Matrix(String),

    #[error(
        "no random-index value for matrix size {0}; consistency ratios are defined for n <= 10"
    )]
    RandomIndexUnavailable(usize),

    #[error("power iteration did not converge within {0} iterations")]
    PowerIterationDiverged(usize),

    #[error("operand {value} for '{what}' is out of range {range}")]
    ScoreOperandOutOfRange {
        what: String,
        value: f64,
        range: String,
    },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("sweep grid is empty or degenerate: {0}")]
    EmptySweep(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    IoAt {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io_at(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors the command line maps to the I/O exit code.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::IoAt { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
