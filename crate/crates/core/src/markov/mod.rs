//! Exact absorption analysis of RLS and the (1+1) EA.
//!
//! Fitness and both mutation operators are exchangeable over positions 2..n,
//! so the process lumps onto `(stored bit, current first bit, ones in 2..n)`,
//! 4n states in all. A full-state chain over every `(stored bit, bitstring)`
//! pair is kept alongside as an independent check of the lumping.

mod brute;
mod hitting;
mod lumped;
mod solver;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::SingleParent;
use crate::error::{Error, Result};
use crate::problem::{prev_first_matches, Weight};
use crate::stagnation::{classify_counts, StagnationEvent};

pub use brute::{brute_force_absorption, BRUTE_FORCE_MAX_N};
pub use hitting::{conditional_hitting_time, HittingTimes};
pub use lumped::{absorption_probabilities, initial_distribution, transition_row};

/// Symmetry-reduced state of a single-parent run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LumpedState {
    pub prev_first: bool,
    pub cur_first: bool,
    /// Ones among positions 2..n.
    pub k: usize,
}

impl LumpedState {
    pub fn new(prev_first: bool, cur_first: bool, k: usize) -> Self {
        Self {
            prev_first,
            cur_first,
            k,
        }
    }

    /// Position in the 4n-long state vectors.
    pub fn index(self, n: usize) -> usize {
        (usize::from(self.prev_first) * 2 + usize::from(self.cur_first)) * n + self.k
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        let pattern = idx / n;
        Self::new(pattern >= 2, pattern % 2 == 1, idx % n)
    }

    /// All 4n states in index order.
    pub fn all(n: usize) -> impl Iterator<Item = LumpedState> {
        (0..4 * n).map(move |i| Self::from_index(i, n))
    }

    pub fn fitness(self, w: Weight) -> i64 {
        i64::from(self.cur_first) + self.k as i64 + w.get() * i64::from(self.prev_first)
    }

    pub fn is_optimum(self, w: Weight, n: usize) -> bool {
        self.cur_first && self.k + 1 == n && prev_first_matches(w, self.prev_first)
    }
}

impl fmt::Display for LumpedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            u8::from(self.prev_first),
            u8::from(self.cur_first),
            self.k
        )
    }
}

/// Probability of ending in each absorbing class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassProbabilities {
    pub optimum: f64,
    pub event1: f64,
    pub event2: f64,
    pub event3: f64,
}

impl ClassProbabilities {
    pub(crate) fn from_array(a: [f64; solver::CLASSES]) -> Self {
        Self {
            optimum: a[0],
            event1: a[1],
            event2: a[2],
            event3: a[3],
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.optimum, self.event1, self.event2, self.event3]
    }

    /// Probability of ending in any stagnation event.
    pub fn failure(self) -> f64 {
        self.event1 + self.event2 + self.event3
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateAbsorption {
    pub state: LumpedState,
    pub probabilities: ClassProbabilities,
}

/// Exact absorption probabilities per lumped state and under the uniform
/// initial law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionResult {
    pub algo: SingleParent,
    pub n: usize,
    pub w: i64,
    /// In [`LumpedState::index`] order.
    pub per_state: Vec<StateAbsorption>,
    pub overall: ClassProbabilities,
    /// Largest residual of the absorption equations.
    pub residual: f64,
    /// Full-state runs only: largest spread of a class probability among the
    /// bitstrings that lump to the same state. Zero when lumping is exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lumping_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hitting_times: Option<HittingTimes>,
}

impl AbsorptionResult {
    pub fn get(&self, s: LumpedState) -> ClassProbabilities {
        self.per_state[s.index(self.n)].probabilities
    }

    /// Largest per-class difference over per-state and overall values.
    pub fn max_abs_diff(&self, other: &AbsorptionResult) -> f64 {
        self.per_state
            .iter()
            .zip(&other.per_state)
            .map(|(a, b)| a.probabilities.max_abs_diff(b.probabilities))
            .fold(self.overall.max_abs_diff(other.overall), f64::max)
    }
}

/// Absorbing class column of a lumped state: 0 for the optimum, 1..=3 for
/// Events I..III.
pub(crate) fn absorbing_class(
    kind: SingleParent,
    w: Weight,
    n: usize,
    s: LumpedState,
) -> Option<usize> {
    if s.is_optimum(w, n) {
        return Some(0);
    }
    classify_counts(kind, w, n, s.prev_first, s.cur_first, s.k).map(|e| match e {
        StagnationEvent::EventI => 1,
        StagnationEvent::EventII => 2,
        StagnationEvent::EventIII => 3,
    })
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::LengthTooSmall(n))
    } else {
        Ok(())
    }
}
