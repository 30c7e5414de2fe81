use thiserror::Error;

/// Errors raised by the exact convex-algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("weight {0} lies outside [0, 1]")]
    WeightOutOfRange(String),

    #[error("distribution weights sum to {0}, not 1")]
    NotNormalized(String),

    #[error("distribution must have at least one weight")]
    EmptyDistribution,

    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("degenerate distribution: last weight is 1")]
    DegenerateDistribution,

    #[error("associativity weight is arbitrary when both weights are 1")]
    DegenerateAssociativity,

    #[error("weight {0} must lie strictly between 0 and 1")]
    DegenerateWeight(String),

    #[error("weight {0} is not in the model's declared grid")]
    UnsupportedWeight(String),

    #[error("point is not in the model's carrier: {0}")]
    NotInCarrier(String),

    #[error("model has no metric")]
    NoMetric,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid cancellation witness: {0}")]
    InvalidWitness(String),

    #[error("invalid translation quad: {0}")]
    InvalidQuad(String),

    #[error("no admissible base point for direction {0}")]
    UnrepresentableDirection(String),

    #[error("embedding is not injective on the sample; {0} collision class(es)")]
    NotInjective(usize),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
