use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mutation::{apply, offspring_summary, MutationOp, Mutator};
use crate::error::{Error, Result};
use crate::problem::{optimum_pair, BitString, Fitness, Weight};

/// A (mu+1) EA individual together with its own stored history bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationMember {
    pub prev_first: bool,
    pub current: BitString,
}

impl PopulationMember {
    pub fn fitness(&self, w: Weight) -> Fitness {
        Fitness::from_counts(w, self.prev_first, self.current.ones())
    }

    pub fn is_optimal(&self, w: Weight) -> bool {
        optimum_pair(w, self.prev_first, &self.current)
    }
}

/// (mu+1) EA population indexed by fitness for O(log mu) survivor selection.
pub(crate) struct Population {
    w: Weight,
    members: Vec<PopulationMember>,
    fitness: Vec<i64>,
    // Position of each member inside its fitness bucket.
    slot: Vec<usize>,
    buckets: BTreeMap<i64, Vec<usize>>,
    mutator: Mutator,
}

pub(crate) struct MuStep {
    /// Slot that received the offspring; `None` when the offspring was removed.
    #[cfg_attr(not(test), allow(dead_code))]
    pub replaced: Option<usize>,
    pub offspring_optimal: bool,
}

impl Population {
    pub(crate) fn new(w: Weight, members: Vec<PopulationMember>) -> Self {
        let n = members[0].current.len();
        let mut pop = Self {
            w,
            fitness: Vec::with_capacity(members.len()),
            slot: Vec::with_capacity(members.len()),
            buckets: BTreeMap::new(),
            mutator: Mutator::new(MutationOp::Standard, n),
            members: Vec::new(),
        };
        for (i, m) in members.iter().enumerate() {
            let f = m.fitness(w).0;
            pop.fitness.push(f);
            let bucket = pop.buckets.entry(f).or_default();
            pop.slot.push(bucket.len());
            bucket.push(i);
        }
        pop.members = members;
        pop
    }

    pub(crate) fn members(&self) -> &[PopulationMember] {
        &self.members
    }

    pub(crate) fn into_members(self) -> Vec<PopulationMember> {
        self.members
    }

    pub(crate) fn any_optimal(&self) -> bool {
        self.members.iter().any(|m| m.is_optimal(self.w))
    }

    fn detach(&mut self, idx: usize) {
        let f = self.fitness[idx];
        let bucket = self.buckets.get_mut(&f).expect("member bucket exists");
        let pos = self.slot[idx];
        bucket.swap_remove(pos);
        if let Some(&moved) = bucket.get(pos) {
            self.slot[moved] = pos;
        }
        if bucket.is_empty() {
            self.buckets.remove(&f);
        }
    }

    fn attach(&mut self, idx: usize, f: i64) {
        self.fitness[idx] = f;
        let bucket = self.buckets.entry(f).or_default();
        self.slot[idx] = bucket.len();
        bucket.push(idx);
    }

    /// Uniform parent, standard bit mutation, then removal of one worst
    /// individual among the mu + 1 with ties broken uniformly.
    pub(crate) fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MuStep {
        let mu = self.members.len();
        let parent = rng.random_range(0..mu);
        let flips = self.mutator.sample(rng);
        let pm = &self.members[parent];
        let (ones, _) = offspring_summary(&pm.current, flips);
        let child_prev = pm.current.first();
        let child_fit = Fitness::from_counts(self.w, child_prev, ones).0;

        let (&worst, bucket) = self.buckets.iter().next().expect("population is non-empty");
        let victim = if child_fit < worst {
            None
        } else {
            let tied = bucket.len() + usize::from(child_fit == worst);
            let r = if tied > 1 {
                rng.random_range(0..tied)
            } else {
                0
            };
            bucket.get(r).copied()
        };

        let Some(victim) = victim else {
            return MuStep {
                replaced: None,
                offspring_optimal: false,
            };
        };
        let child = PopulationMember {
            prev_first: child_prev,
            current: apply(&self.members[parent].current, flips),
        };
        let optimal = child.is_optimal(self.w);
        self.detach(victim);
        self.members[victim] = child;
        self.attach(victim, child_fit);
        MuStep {
            replaced: Some(victim),
            offspring_optimal: optimal,
        }
    }
}

/// One generation of the (mu+1) EA on an explicit population.
pub fn step_mu_plus_one<R: Rng + ?Sized>(
    mu: usize,
    w: Weight,
    pop: &[PopulationMember],
    rng: &mut R,
) -> Result<Vec<PopulationMember>> {
    if mu == 0 {
        return Err(Error::InvalidMu);
    }
    if pop.len() != mu {
        return Err(Error::PopulationSize {
            expected: mu,
            actual: pop.len(),
        });
    }
    let n = pop[0].current.len();
    if let Some(m) = pop.iter().find(|m| m.current.len() != n) {
        return Err(Error::LengthMismatch(n, m.current.len()));
    }
    let mut p = Population::new(w, pop.to_vec());
    p.step(rng);
    Ok(p.into_members())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn member(prev: bool, s: &str) -> PopulationMember {
        PopulationMember {
            prev_first: prev,
            current: s.parse().unwrap(),
        }
    }

    fn w(v: i64) -> Weight {
        Weight::new(v).unwrap()
    }

    #[test]
    fn size_is_preserved_and_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pop: Vec<_> = (0..7)
            .map(|_| PopulationMember {
                prev_first: rng.random(),
                current: BitString::random(9, &mut rng).unwrap(),
            })
            .collect();
        for _ in 0..500 {
            pop = step_mu_plus_one(7, w(-3), &pop, &mut rng).unwrap();
            assert_eq!(pop.len(), 7);
        }
        assert_eq!(
            step_mu_plus_one(6, w(0), &pop, &mut rng),
            Err(Error::PopulationSize {
                expected: 6,
                actual: 7
            })
        );
        assert_eq!(
            step_mu_plus_one(0, w(0), &[], &mut rng),
            Err(Error::InvalidMu)
        );
    }

    #[test]
    fn uniform_tie_break_when_all_fitnesses_equal() {
        // Three distinct members with two ones each at w = 0. Conditioning on
        // an offspring that also has two ones, each of the four candidates is
        // removed with probability 1/4.
        let mu = 3;
        let pop = vec![
            member(false, "1100"),
            member(true, "1010"),
            member(false, "0101"),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut removed = [0u64; 4];
        for _ in 0..200_000 {
            let mut p = Population::new(w(0), pop.clone());
            let mut probe = rng.clone();
            let parent: usize = probe.random_range(0..mu);
            let flips = p.mutator.sample(&mut probe).to_vec();
            let (ones, _) = offspring_summary(&pop[parent].current, &flips);
            let res = p.step(&mut rng);
            if ones == 2 {
                removed[res.replaced.unwrap_or(mu)] += 1;
            }
        }
        let total: u64 = removed.iter().sum();
        let sd = (total as f64 * 0.25 * 0.75).sqrt();
        for c in removed {
            assert!(
                (c as f64 - total as f64 / 4.0).abs() < 4.0 * sd,
                "{removed:?}"
            );
        }
    }

    #[test]
    fn stored_one_never_beats_stored_zero_below_minus_n() {
        // With w <= -n every member carrying stored bit 1 scores at most
        // w + n <= 0 and every member with stored bit 0 scores at least 0,
        // so selection always prefers the latter or ties at 0.
        let n = 4;
        for wv in [-4, -5, -9] {
            for a in 0u64..16 {
                for b in 0u64..16 {
                    let one = PopulationMember {
                        prev_first: true,
                        current: BitString::from_mask(a, n).unwrap(),
                    };
                    let zero = PopulationMember {
                        prev_first: false,
                        current: BitString::from_mask(b, n).unwrap(),
                    };
                    assert!(one.fitness(w(wv)) <= zero.fitness(w(wv)));
                }
            }
        }
    }
}
