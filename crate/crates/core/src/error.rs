use crate::rational::ParseRationalError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A problem, price or model document failed validation at `location`.
    #[error("{location}: {message}")]
    Load { location: String, message: String },

    // Not a `#[from]` source: the message already carries the detail.
    #[error("malformed JSON: {0}")]
    Json(serde_json::Error),

    #[error(transparent)]
    Rational(#[from] ParseRationalError),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unknown act `{0}`")]
    UnknownAct(String),

    #[error("event is not a subset of the state space")]
    EventOutOfRange,

    #[error("conditioning on null event")]
    ConditioningOnNull,

    #[error("conditioning on probability-zero event")]
    ZeroProbability,

    #[error("no probability measure supplied; the audit needs event masses")]
    MissingProbability,

    #[error("problem too large for joint fitting ({size} > cap {cap}); fix the utility or the measure and fit the other")]
    CapExceeded { size: usize, cap: usize },

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange {
        value: String,
        lo: String,
        hi: String,
    },

    #[error("session is not active")]
    SessionNotActive,

    #[error("no pending query; ask for the next query first")]
    NoPendingQuery,

    #[error("unknown response `{0}` (expected player, bookie or indifferent)")]
    UnknownResponse(String),

    #[error("session has no preference problem attached")]
    NoPreferenceProblem,

    #[error("unknown session `{0}`")]
    UnknownSession(String),
}

impl Error {
    pub fn load(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Load {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
