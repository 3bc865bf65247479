use serde::{Deserialize, Serialize};

use super::lumped::{absorption_probabilities, initial_distribution, row_indexed};
use super::solver::{conditioned_hitting, Chain};
use super::{absorbing_class, check_n, LumpedState};
use crate::algorithms::SingleParent;
use crate::error::{Error, Result};
use crate::problem::Weight;

/// Expected generations until the optimum, conditioned on reaching it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingTimes {
    pub n: usize,
    /// In [`LumpedState::index`] order; `None` where the optimum has
    /// probability zero.
    pub per_state: Vec<Option<f64>>,
    /// Under the uniform initial law, conditioned on success. Optimum
    /// initializations count as zero generations.
    pub overall: f64,
    pub residual: f64,
}

impl HittingTimes {
    pub fn get(&self, s: LumpedState) -> Result<f64> {
        self.per_state[s.index(self.n)].ok_or(Error::OptimumUnreachable(s))
    }
}

/// Conditional expected hitting time of the optimum for every lumped state.
pub fn conditional_hitting_time(kind: SingleParent, w: Weight, n: usize) -> Result<HittingTimes> {
    check_n(n)?;
    let absorption = absorption_probabilities(kind, w, n)?;
    let h: Vec<f64> = absorption
        .per_state
        .iter()
        .map(|e| e.probabilities.optimum)
        .collect();
    let states: Vec<LumpedState> = LumpedState::all(n).collect();
    let level: Vec<i64> = states.iter().map(|s| s.fitness(w)).collect();
    let absorbing: Vec<Option<usize>> = states
        .iter()
        .map(|&s| absorbing_class(kind, w, n, s))
        .collect();
    let row = |i: usize| row_indexed(kind, w, n, LumpedState::from_index(i, n));
    let label = |i: usize| LumpedState::from_index(i, n).to_string();
    let c = conditioned_hitting(
        &Chain {
            level: &level,
            absorbing: &absorbing,
            row: &row,
            label: &label,
        },
        &h,
    )?;

    let pi = initial_distribution(n);
    let (mut num, mut den) = (0.0, 0.0);
    for ((p, hs), tau) in pi.iter().zip(&h).zip(&c.tau) {
        if let Some(t) = tau {
            num += p * hs * t;
            den += p * hs;
        }
    }
    Ok(HittingTimes {
        n,
        per_state: c.tau,
        overall: num / den,
        residual: c.residual,
    })
}
