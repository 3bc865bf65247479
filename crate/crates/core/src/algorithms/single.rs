use rand::Rng;

use super::mutation::{apply, offspring_summary, Mutator};
use super::SingleParent;
use crate::problem::{fitness, BitString, Fitness, TLState, Weight};

/// Whether `offspring` replaces the incumbent of `s`.
///
/// The offspring is scored with the incumbent's first bit as its stored
/// history and compared with `>=` against the incumbent's own fitness.
pub fn accept(w: Weight, s: &TLState, offspring: &BitString) -> bool {
    debug_assert_eq!(offspring.len(), s.current.len());
    fitness(w, s.current.first(), offspring) >= s.fitness(w)
}

/// One generation of RLS or the (1+1) EA.
pub fn step<R: Rng + ?Sized>(kind: SingleParent, w: Weight, s: &TLState, rng: &mut R) -> TLState {
    let mut next = s.clone();
    let mut mutator = Mutator::new(kind.mutation(), s.n());
    step_in_place(w, &mut next, &mut mutator, rng);
    next
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct StepInfo {
    pub accepted: bool,
    #[cfg_attr(not(test), allow(dead_code))]
    pub offspring_fitness: Fitness,
}

pub(crate) fn step_in_place<R: Rng + ?Sized>(
    w: Weight,
    s: &mut TLState,
    mutator: &mut Mutator,
    rng: &mut R,
) -> StepInfo {
    let flips = mutator.sample(rng);
    let (ones, _) = offspring_summary(&s.current, flips);
    let offspring_fitness = Fitness::from_counts(w, s.current.first(), ones);
    s.g += 1;
    let accepted = offspring_fitness >= s.fitness(w);
    if accepted {
        let child = apply(&s.current, flips);
        s.prev_first = s.current.first();
        s.current = child;
        s.t += 1;
    }
    StepInfo {
        accepted,
        offspring_fitness,
    }
}
