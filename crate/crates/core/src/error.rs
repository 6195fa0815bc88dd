use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("angle is undefined when a ray has zero length")]
    DegenerateAngle,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("malformed topology: {0}")]
    MalformedTopology(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("unsupported weights: {0}")]
    UnsupportedWeights(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("instance too large: {n} sources exceeds the enumeration limit of {limit}")]
    GuardRefusal { n: usize, limit: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("document error: {0}")]
    Document(String),
}
