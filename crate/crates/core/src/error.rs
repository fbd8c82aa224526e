use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,
    #[error("unnormalized")]
    Unnormalized,
    #[error("ratio undefined")]
    RatioUndefined,
    #[error("outside guaranteed convergence")]
    OutsideConvergence,
    #[error("search exhausted")]
    SearchExhausted,
    #[error("formula preconditions violated")]
    Preconditions,
    #[error("constant field extension")]
    ConstantField,
    #[error("mixed bases")]
    MixedBases,
    #[error("missing parameter: {0}")]
    Missing(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
