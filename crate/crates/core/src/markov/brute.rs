//! Unlumped chain over every `(stored bit, bitstring)` pair.

use super::solver::{absorb, Chain, Row};
use super::{check_n, AbsorptionResult, ClassProbabilities, LumpedState, StateAbsorption};
use crate::algorithms::SingleParent;
use crate::error::{Error, Result};
use crate::problem::Weight;
use crate::stagnation::{classify_counts, StagnationEvent};

/// Largest n accepted by [`brute_force_absorption`].
pub const BRUTE_FORCE_MAX_N: usize = 12;

// Bit i of a mask is position i + 1 of the bitstring.
struct Full {
    kind: SingleParent,
    w: i64,
    n: usize,
}

impl Full {
    fn states(&self) -> usize {
        2 << self.n
    }

    fn split(&self, idx: usize) -> (bool, u32) {
        (idx >> self.n == 1, (idx & ((1 << self.n) - 1)) as u32)
    }

    fn join(&self, prev: bool, mask: u32) -> usize {
        (usize::from(prev) << self.n) | mask as usize
    }

    fn value(&self, prev: bool, mask: u32) -> i64 {
        i64::from(mask.count_ones()) + self.w * i64::from(prev)
    }

    fn class(&self, prev: bool, mask: u32) -> Option<usize> {
        let full = (1u32 << self.n) - 1;
        if mask == full && (self.w == 0 || (self.w < 0) != prev) {
            return Some(0);
        }
        let first = mask & 1 == 1;
        let rest = (mask >> 1).count_ones() as usize;
        let w = Weight::new(self.w).expect("validated weight");
        classify_counts(self.kind, w, self.n, prev, first, rest).map(|e| match e {
            StagnationEvent::EventI => 1,
            StagnationEvent::EventII => 2,
            StagnationEvent::EventIII => 3,
        })
    }

    fn row(&self, idx: usize) -> Row {
        let (prev, x) = self.split(idx);
        let parent = self.value(prev, x);
        let child_prev = x & 1 == 1;
        let mut row: Row = Vec::new();
        let mut stay = 0.0;
        let mut offer = |y: u32, p: f64| {
            let t = self.join(child_prev, y);
            if self.value(child_prev, y) >= parent && t != idx {
                row.push((t, p));
            } else {
                stay += p;
            }
        };
        let n = self.n;
        match self.kind {
            SingleParent::Rls => {
                for i in 0..n {
                    offer(x ^ (1 << i), 1.0 / n as f64);
                }
            }
            SingleParent::OnePlusOneEa => {
                let p = 1.0 / n as f64;
                let by_distance: Vec<f64> = (0..=n)
                    .map(|d| p.powi(d as i32) * (1.0 - p).powi((n - d) as i32))
                    .collect();
                for y in 0..(1u32 << n) {
                    offer(y, by_distance[(x ^ y).count_ones() as usize]);
                }
            }
        }
        if stay > 0.0 {
            row.push((idx, stay));
        }
        row
    }
}

/// Absorption probabilities from the full `2 * 2^n`-state chain, reported
/// per lumped state as the mean over the bitstrings in each class.
pub fn brute_force_absorption(kind: SingleParent, w: Weight, n: usize) -> Result<AbsorptionResult> {
    check_n(n)?;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::EnumerationLimit {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let full = Full {
        kind,
        w: w.get(),
        n,
    };
    let count = full.states();
    let level: Vec<i64> = (0..count)
        .map(|i| {
            let (p, x) = full.split(i);
            full.value(p, x)
        })
        .collect();
    let absorbing: Vec<Option<usize>> = (0..count)
        .map(|i| {
            let (p, x) = full.split(i);
            full.class(p, x)
        })
        .collect();
    let row = |i: usize| full.row(i);
    let label = |i: usize| {
        let (p, x) = full.split(i);
        let bits: String = (0..n)
            .map(|b| if x >> b & 1 == 1 { '1' } else { '0' })
            .collect();
        format!("({}, {bits})", u8::from(p))
    };
    let a = absorb(&Chain {
        level: &level,
        absorbing: &absorbing,
        row: &row,
        label: &label,
    })?;

    let lumps = 4 * n;
    let mut sum = vec![[0.0; 4]; lumps];
    let mut lo = vec![[f64::INFINITY; 4]; lumps];
    let mut hi = vec![[f64::NEG_INFINITY; 4]; lumps];
    let mut size = vec![0usize; lumps];
    let mut overall = [0.0; 4];
    for (i, h) in a.h.iter().enumerate() {
        let (p, x) = full.split(i);
        let ls = LumpedState::new(p, x & 1 == 1, (x >> 1).count_ones() as usize).index(n);
        size[ls] += 1;
        for c in 0..4 {
            sum[ls][c] += h[c];
            lo[ls][c] = lo[ls][c].min(h[c]);
            hi[ls][c] = hi[ls][c].max(h[c]);
            overall[c] += h[c];
        }
    }
    let mut spread = 0.0f64;
    let per_state = LumpedState::all(n)
        .map(|state| {
            let i = state.index(n);
            let mut mean = [0.0; 4];
            for c in 0..4 {
                mean[c] = sum[i][c] / size[i] as f64;
                spread = spread.max(hi[i][c] - lo[i][c]);
            }
            StateAbsorption {
                state,
                probabilities: ClassProbabilities::from_array(mean),
            }
        })
        .collect();
    for v in overall.iter_mut() {
        *v /= count as f64;
    }
    Ok(AbsorptionResult {
        algo: kind,
        n,
        w: w.get(),
        per_state,
        overall: ClassProbabilities::from_array(overall),
        residual: a.residual,
        lumping_spread: Some(spread),
        hitting_times: None,
    })
}
