use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero vector cannot define an observable")]
    ZeroVector,

    #[error("observable {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("matrix does not square to the identity")]
    NotInvolutory,

    #[error("scenario has no observables")]
    EmptyScenario,

    #[error("observable index {index} out of range (n = {n})")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("context {context} contains incompatible observables {pair:?}")]
    InvalidContext { context: String, pair: (usize, usize) },

    #[error("context {0} listed twice")]
    DuplicateContext(String),

    #[error("context {0} is not in the context set")]
    UnknownContext(String),

    #[error("claimed optimum {claimed} is above the attainable bound {found}")]
    NotOptimal { claimed: String, found: String },

    #[error("empty context")]
    EmptyContext,

    #[error("{n} observables exceed the enumeration guard of {guard} (raise it explicitly)")]
    EnumerationGuard { n: usize, guard: usize },

    #[error("coefficient count {found} does not match context count {expected}")]
    CoefficientCount { expected: usize, found: usize },

    #[error("noncontextual bound must be positive to define a violation")]
    NonPositiveBound,

    #[error("no assignment saturates the inequality (bound is not the noncontextual maximum)")]
    NotSaturated,

    #[error("rational reconstruction failed at denominator bound {bound}")]
    Reconstruction { bound: u64 },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("internal solver failure: {0}")]
    Internal(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
