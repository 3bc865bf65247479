//! Time-linkage OneMax_w laboratory.
//!
//! The fitness `f(x_prev, x) = |x| + w * x_prev[1]` rewards or penalizes the
//! first bit of the previous solution. This crate runs RLS, the (1+1) EA and
//! the (mu+1) EA on it, recognizes the provable stagnation states, computes
//! exact convergence probabilities on a lumped Markov chain and estimates
//! them by Monte Carlo.

pub mod algorithms;
pub mod error;
pub mod markov;
pub mod montecarlo;
pub mod problem;
pub mod stagnation;
pub mod verify;

pub use algorithms::{
    run_trial, run_trial_traced, AlgorithmKind, FinalState, PopulationMember, SingleParent,
    TraceRecord, TrialOutcome, TrialResult,
};
pub use error::{Error, Result};
pub use markov::{
    absorption_probabilities, brute_force_absorption, conditional_hitting_time, AbsorptionResult,
    ClassProbabilities, HittingTimes, LumpedState,
};
pub use montecarlo::{estimate, runtime_scaling, wilson_ci, EstimateResult, ExperimentConfig};
pub use problem::{fitness, is_global_optimum, random_init, BitString, Fitness, TLState, Weight};
pub use stagnation::{classify, is_absorbing_oracle, StagnationEvent};
pub use verify::LemmaReport;
