use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("OUT_OF_RANGE_ENTRY: operation `{op}` has entry {value} at position {position}, universe size is {size}")]
    OutOfRangeEntry {
        op: String,
        position: String,
        value: i64,
        size: usize,
    },

    #[error("SHAPE_MISMATCH: operation `{op}` {detail}")]
    ShapeMismatch { op: String, detail: String },

    #[error("DUPLICATE_OP_NAME: operation `{0}` is declared more than once")]
    DuplicateOpName(String),

    #[error("EMPTY_UNIVERSE: algebra `{0}` has size 0")]
    EmptyUniverse(String),

    #[error("INVALID_LABELS: {0}")]
    InvalidLabels(String),

    #[error("SIGNATURE_MISMATCH: `{left}` and `{right}` have different signatures")]
    SignatureMismatch { left: String, right: String },

    #[error("NOT_A_CONGRUENCE: {0}")]
    NotACongruence(String),

    #[error("NOT_A_HOMOMORPHISM: {0}")]
    NotAHomomorphism(String),

    #[error("EMPTY_CLOSURE: empty seed in a signature without constants")]
    EmptyClosure,

    #[error("RESOURCE_LIMIT: {what} exceeded the configured bound of {limit}")]
    ResourceLimit { what: String, limit: usize },

    #[error("WITNESS_INVALID: {0}")]
    WitnessInvalid(String),

    #[error("INTERNAL_CONTRADICTION: {0}")]
    InternalContradiction(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn resource(what: impl Into<String>, limit: usize) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            limit,
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
