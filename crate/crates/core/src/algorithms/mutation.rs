use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::problem::BitString;

/// Mutation operator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MutationOp {
    /// Flip exactly one uniformly chosen position.
    OneBit,
    /// Flip each position independently with probability 1/n.
    Standard,
}

/// Samples flip positions without materialising the offspring.
///
/// Standard bit mutation walks geometric gaps between flipped positions, so a
/// call costs O(number of flips) rather than O(n).
pub(crate) struct Mutator {
    op: MutationOp,
    n: usize,
    gap: Option<Geometric>,
    flips: Vec<usize>,
}

impl Mutator {
    pub(crate) fn new(op: MutationOp, n: usize) -> Self {
        let gap = match op {
            MutationOp::OneBit => None,
            MutationOp::Standard => {
                Some(Geometric::new(1.0 / n as f64).expect("1/n is a valid probability"))
            }
        };
        Self {
            op,
            n,
            gap,
            flips: Vec::with_capacity(8),
        }
    }

    /// Positions to flip, in increasing order.
    pub(crate) fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[usize] {
        self.flips.clear();
        match self.op {
            MutationOp::OneBit => self.flips.push(rng.random_range(0..self.n)),
            MutationOp::Standard => {
                let gap = self.gap.as_ref().expect("standard mutation has a gap law");
                let mut pos = gap.sample(rng);
                while pos < self.n as u64 {
                    self.flips.push(pos as usize);
                    pos += 1 + gap.sample(rng);
                }
            }
        }
        &self.flips
    }
}

/// Offspring ones count and first bit after applying `flips` to `x`.
#[inline]
pub(crate) fn offspring_summary(x: &BitString, flips: &[usize]) -> (usize, bool) {
    let mut ones = x.ones();
    let mut first = x.first();
    for &i in flips {
        if x.get(i) {
            ones -= 1;
        } else {
            ones += 1;
        }
        if i == 0 {
            first = !first;
        }
    }
    (ones, first)
}

pub(crate) fn apply(x: &BitString, flips: &[usize]) -> BitString {
    let mut y = x.clone();
    for &i in flips {
        y.flip(i);
    }
    y
}

/// One-bit mutation: flips exactly one uniformly chosen position.
pub fn mutate_rls<R: Rng + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    let mut m = Mutator::new(MutationOp::OneBit, x.len());
    let flips = m.sample(rng);
    apply(x, flips)
}

/// Standard bit mutation with rate 1/n.
pub fn mutate_ea<R: Rng + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    let mut m = Mutator::new(MutationOp::Standard, x.len());
    let flips = m.sample(rng);
    apply(x, flips)
}
