use thiserror::Error;

/// Errors surfaced by every solver module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("reaction is not classifiable: {0}")]
    NotClassifiable(String),
    #[error("assumption (H) violated: {0}")]
    HypothesisHViolated(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("supremum is unbounded near v = 0")]
    Unbounded,
    #[error("stiffness failure: step size underflow at v = {last_v}")]
    StiffnessFailure { last_v: f64 },
    #[error("bracket failure: predicate not split on [{low}, {high}] after {expansions} expansions")]
    BracketFailure { low: f64, high: f64, expansions: usize },
    #[error("reduction is not admissible: y vanishes at interior v = {0}")]
    NotAdmissible(f64),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("no prediction: {0}")]
    NoPrediction(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
