use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("similarity matrix is not positive definite (pivot {pivot:e} at step {step})")]
    NotPositiveDefinite { step: usize, pivot: f64 },

    #[error("quadratic form vanishes for the given weight vector")]
    ZeroQuadraticForm,

    #[error("projection dimension k = {k} exceeds the supported maximum of 3")]
    DimensionTooLarge { k: usize },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("inradius section {index} is not contained in the body")]
    SectionNotContained { index: usize },

    #[error("internal identity failed: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
