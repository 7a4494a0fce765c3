use thiserror::Error;

/// Errors raised by constructors and operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("message ({0}) has zero probability")]
    ZeroProbabilityMessage(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("x-marginal differs from the baseline at ({x}, state {state})")]
    MarginalMismatch { x: String, state: usize },
    #[error("likelihood vector is identically zero")]
    ZeroLikelihood,
    #[error("action {0} is not rationalizable")]
    NotRationalizable(String),
    #[error("y-marginal of {y} differs between states {s1} and {s2}")]
    SecrecyViolation { y: String, s1: usize, s2: usize },
    #[error("expected {expected} states, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("baseline has {0} non-monotone messages; at most one allowed")]
    NotAlmostDirectional(usize),
    #[error("condition fails at state {state}")]
    ConditionFails { state: usize },
    #[error("structure is not secret and plausibly deniable: {0}")]
    NotSpd(String),
    #[error("invalid utility: {0}")]
    InvalidUtility(String),
    #[error("state spaces differ ({0} vs {1})")]
    StateMismatch(usize, usize),
    #[error("no witness found in the search family")]
    WitnessNotFound,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
