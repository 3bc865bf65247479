use thiserror::Error;

use crate::markov::LumpedState;

/// Errors produced by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bitstring length must be at least 2, got {0}")]
    LengthTooSmall(usize),

    #[error("invalid bitstring literal {0:?}: expected only '0' and '1'")]
    InvalidBitLiteral(String),

    #[error("bitstring lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("weight {0} is outside the supported range [-2^31, 2^31]")]
    WeightOutOfRange(i64),

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("population size mu must be at least 1")]
    InvalidMu,

    #[error("population must hold {expected} members, got {actual}")]
    PopulationSize { expected: usize, actual: usize },

    #[error("{0} is not a single-parent algorithm")]
    NotSingleParent(String),

    #[error("n = {n} exceeds the enumeration limit {limit} for this operation")]
    EnumerationLimit { n: usize, limit: usize },

    #[error("absorbing chain is not almost surely absorbed: state {state} has mass {mass}")]
    NotAbsorbed { state: String, mass: f64 },

    #[error("absorption probability {value} of state {state} is outside [-1e-12, 1 + 1e-12]")]
    ProbabilityOutOfRange { state: String, value: f64 },

    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("optimum is unreachable from state {0}")]
    OptimumUnreachable(LumpedState),

    #[error("Wilson interval needs at least one trial and k <= N (k = {k}, N = {total})")]
    InvalidProportion { k: u64, total: u64 },

    #[error("z must be positive, got {0}")]
    InvalidZ(f64),

    #[error("weight {weight} violates the precondition w < -n (n = {n})")]
    WeightNotBelowMinusN { weight: i64, n: usize },

    #[error("weight {weight} violates the precondition w <= -n (n = {n})")]
    WeightAboveMinusN { weight: i64, n: usize },

    #[error("runtime scaling is only defined for w >= 0, got {0}")]
    NegativeScalingWeight(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
