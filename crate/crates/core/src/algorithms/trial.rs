use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mutation::Mutator;
use super::population::{Population, PopulationMember};
use super::single::step_in_place;
use super::{AlgorithmKind, SingleParent};
use crate::error::{Error, Result};
use crate::problem::{is_global_optimum, random_init, BitString, Fitness, TLState, Weight};
use crate::stagnation::{classify, StagnationEvent};

/// How a trial ended. `g` is the number of offspring evaluations used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TrialResult {
    OptimumReached { g: u64 },
    Stagnated { event: StagnationEvent, g: u64 },
    BudgetExhausted { g: u64 },
}

impl TrialResult {
    pub fn generations(&self) -> u64 {
        match *self {
            TrialResult::OptimumReached { g }
            | TrialResult::Stagnated { g, .. }
            | TrialResult::BudgetExhausted { g } => g,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, TrialResult::OptimumReached { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalState {
    Single(TLState),
    Population(Vec<PopulationMember>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub result: TrialResult,
    pub final_state: FinalState,
}

/// One line of a single-parent trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub g: u64,
    pub t: u64,
    pub prev_first: bool,
    pub current: BitString,
    pub fitness: Fitness,
    /// Whether the offspring of this generation was accepted; `true` for the
    /// initial record.
    pub accepted: bool,
    /// Terminal classification, present on the last record only.
    pub result: Option<TrialResult>,
}

/// Runs one seeded trial until the optimum, a proven stagnation event, or
/// the evaluation budget.
pub fn run_trial(
    kind: AlgorithmKind,
    w: Weight,
    n: usize,
    budget: u64,
    seed: u64,
) -> Result<TrialOutcome> {
    match kind.validate()? {
        AlgorithmKind::MuPlusOneEa { mu } => run_mu_plus_one(mu, w, n, budget, seed),
        k => {
            let kind = SingleParent::try_from(k)?;
            run_trial_traced(kind, w, n, budget, seed, |_| {})
        }
    }
}

/// Single-parent trial that reports every generation to `observe`.
pub fn run_trial_traced<F: FnMut(&TraceRecord)>(
    kind: SingleParent,
    w: Weight,
    n: usize,
    budget: u64,
    seed: u64,
    mut observe: F,
) -> Result<TrialOutcome> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = random_init(n, &mut rng)?;
    let mut mutator = Mutator::new(kind.mutation(), n);

    let record = |s: &TLState, accepted: bool, result: Option<TrialResult>| TraceRecord {
        g: s.g,
        t: s.t,
        prev_first: s.prev_first,
        current: s.current.clone(),
        fitness: s.fitness(w),
        accepted,
        result,
    };

    let mut result = terminal(kind, w, &s);
    observe(&record(&s, true, result));
    while result.is_none() {
        if s.g >= budget {
            result = Some(TrialResult::BudgetExhausted { g: s.g });
            observe(&record(&s, false, result));
            break;
        }
        let info = step_in_place(w, &mut s, &mut mutator, &mut rng);
        if info.accepted {
            result = terminal(kind, w, &s);
        }
        observe(&record(&s, info.accepted, result));
    }

    Ok(TrialOutcome {
        result: result.expect("loop exits with a result"),
        final_state: FinalState::Single(s),
    })
}

fn terminal(kind: SingleParent, w: Weight, s: &TLState) -> Option<TrialResult> {
    if is_global_optimum(w, s) {
        Some(TrialResult::OptimumReached { g: s.g })
    } else {
        classify(kind, w, s).map(|event| TrialResult::Stagnated { event, g: s.g })
    }
}

fn run_mu_plus_one(mu: usize, w: Weight, n: usize, budget: u64, seed: u64) -> Result<TrialOutcome> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..mu)
        .map(|_| {
            random_init(n, &mut rng).map(|s| PopulationMember {
                prev_first: s.prev_first,
                current: s.current,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pop = Population::new(w, members);

    let mut g = 0u64;
    let mut found = pop.any_optimal();
    while !found && g < budget {
        found = pop.step(&mut rng).offspring_optimal;
        g += 1;
    }
    let result = if found {
        TrialResult::OptimumReached { g }
    } else {
        TrialResult::BudgetExhausted { g }
    };
    Ok(TrialOutcome {
        result,
        final_state: FinalState::Population(pop.into_members()),
    })
}

/// Replays a (mu+1) EA trial and returns the population after every generation.
#[doc(hidden)]
pub fn mu_plus_one_snapshots(
    mu: usize,
    w: Weight,
    n: usize,
    generations: u64,
    seed: u64,
) -> Result<Vec<Vec<PopulationMember>>> {
    if mu == 0 {
        return Err(Error::InvalidMu);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..mu)
        .map(|_| {
            random_init(n, &mut rng).map(|s| PopulationMember {
                prev_first: s.prev_first,
                current: s.current,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pop = Population::new(w, members);
    let mut out = vec![pop.members().to_vec()];
    for _ in 0..generations {
        pop.step(&mut rng);
        out.push(pop.members().to_vec());
    }
    Ok(out)
}
