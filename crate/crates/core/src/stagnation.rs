//! Proven absorbing failure events and a first-principles absorption oracle.
//!
//! `classify` only recognises the three event families that are known to be
//! inescapable:
//!
//! * Event I (w <= -2): first-bit pattern (0, 1), current not 1^n, and for the
//!   (1+1) EA the ones among positions 2..n lie in `[w+n .. n-2]`.
//! * Event II (w < 0): stored bit 1 with current 1^n.
//! * Event III (w > 0): first-bit pattern (1, 0); RLS needs w > 1, the (1+1) EA
//!   needs the ones among positions 2..n in `[n-w+1 .. n-1]`.
//!
//! The oracle does not look at these rules. It enumerates offspring directly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::SingleParent;
use crate::error::{Error, Result};
use crate::problem::{BitString, TLState, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StagnationEvent {
    #[serde(rename = "event1")]
    EventI,
    #[serde(rename = "event2")]
    EventII,
    #[serde(rename = "event3")]
    EventIII,
}

impl StagnationEvent {
    pub fn id(self) -> &'static str {
        match self {
            StagnationEvent::EventI => "event1",
            StagnationEvent::EventII => "event2",
            StagnationEvent::EventIII => "event3",
        }
    }
}

impl fmt::Display for StagnationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Matches `s` against the proven stagnation events.
pub fn classify(kind: SingleParent, w: Weight, s: &TLState) -> Option<StagnationEvent> {
    classify_counts(
        kind,
        w,
        s.n(),
        s.prev_first,
        s.current.first(),
        s.current.rest_ones(),
    )
}

/// Same as [`classify`] on the symmetry-reduced description: stored bit,
/// current first bit and ones among positions 2..n.
pub fn classify_counts(
    kind: SingleParent,
    w: Weight,
    n: usize,
    prev_first: bool,
    cur_first: bool,
    rest_ones: usize,
) -> Option<StagnationEvent> {
    let w = w.get();
    let n_i = n as i64;
    let k = rest_ones as i64;
    let all_ones = cur_first && rest_ones + 1 == n;
    let ea = kind == SingleParent::OnePlusOneEa;

    if w < 0 && prev_first && all_ones {
        return Some(StagnationEvent::EventII);
    }
    if w <= -2 && !prev_first && cur_first && !all_ones && (!ea || (w + n_i..=n_i - 2).contains(&k))
    {
        return Some(StagnationEvent::EventI);
    }
    if w > 0 && prev_first && !cur_first {
        let fires = if ea {
            (n_i - w + 1..=n_i - 1).contains(&k)
        } else {
            w > 1
        };
        if fires {
            return Some(StagnationEvent::EventIII);
        }
    }
    None
}

/// Largest n the oracle enumerates.
pub const ORACLE_MAX_N: usize = 16;

/// Whether `s` is an absorbing non-optimal state: no offspring the algorithm
/// can produce is accepted, or every accepted offspring recreates `s` itself.
///
/// Offspring are enumerated exhaustively (n one-bit flips for RLS, all 2^n
/// strings for the (1+1) EA, each of which has positive probability), so the
/// answer does not depend on `classify`.
pub fn is_absorbing_oracle(kind: SingleParent, w: Weight, s: &TLState) -> Result<bool> {
    let n = s.n();
    if n > ORACLE_MAX_N {
        return Err(Error::EnumerationLimit {
            n,
            limit: ORACLE_MAX_N,
        });
    }
    let mask = to_mask(&s.current);
    Ok(is_absorbing_mask(kind, w.get(), n, s.prev_first, mask))
}

fn to_mask(x: &BitString) -> u32 {
    x.bits()
        .iter()
        .enumerate()
        .fold(0, |m, (i, &b)| m | (u32::from(b) << i))
}

fn optimum(w: i64, n: usize, prev: bool, mask: u32) -> bool {
    mask == full(n)
        && match w.signum() {
            -1 => !prev,
            0 => true,
            _ => prev,
        }
}

#[inline]
fn full(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

#[inline]
fn value(w: i64, prev: bool, mask: u32) -> i64 {
    i64::from(mask.count_ones()) + if prev { w } else { 0 }
}

/// Calls `f(child)` for each offspring with positive probability.
fn for_each_offspring(kind: SingleParent, n: usize, mask: u32, mut f: impl FnMut(u32) -> bool) {
    match kind {
        SingleParent::Rls => {
            for i in 0..n {
                if !f(mask ^ (1 << i)) {
                    return;
                }
            }
        }
        SingleParent::OnePlusOneEa => {
            for child in 0..=full(n) {
                if !f(child) {
                    return;
                }
            }
        }
    }
}

fn is_absorbing_mask(kind: SingleParent, w: i64, n: usize, prev: bool, mask: u32) -> bool {
    if optimum(w, n, prev, mask) {
        return false;
    }
    let incumbent = value(w, prev, mask);
    let first = mask & 1 == 1;
    let mut moves = false;
    for_each_offspring(kind, n, mask, |child| {
        let accepted = value(w, first, child) >= incumbent;
        if accepted && (first != prev || child != mask) {
            moves = true;
        }
        !moves
    });
    !moves
}

/// Full-state reachability analysis for one `(kind, w, n)`.
///
/// A state is *doomed* when the optimum cannot be reached from it under any
/// sequence of accepted offspring. Every absorbing non-optimal state is
/// doomed, but a doomed state may still move (towards another doomed state).
pub struct ReachabilityOracle {
    kind: SingleParent,
    w: i64,
    n: usize,
    // Indexed by (prev << n) | mask.
    reaches_optimum: Vec<bool>,
}

impl ReachabilityOracle {
    pub fn new(kind: SingleParent, w: Weight, n: usize) -> Result<Self> {
        if !(2..=ORACLE_MAX_N).contains(&n) {
            return Err(if n < 2 {
                Error::LengthTooSmall(n)
            } else {
                Error::EnumerationLimit {
                    n,
                    limit: ORACLE_MAX_N,
                }
            });
        }
        let w = w.get();
        let states = 2usize << n;
        let mut reach = vec![false; states];
        for (idx, r) in reach.iter_mut().enumerate() {
            let (prev, mask) = split(idx, n);
            *r = optimum(w, n, prev, mask);
        }
        // Accepted successors never lower fitness, so sweeping from high to low
        // fitness settles most states in one pass.
        let mut order: Vec<usize> = (0..states).collect();
        order.sort_by_key(|&idx| {
            let (prev, mask) = split(idx, n);
            std::cmp::Reverse(value(w, prev, mask))
        });
        // For the (1+1) EA every string is a possible offspring, so a state
        // reaches the optimum iff some marked successor (first, y) has
        // |y| >= threshold. `best[b]` is the largest |y| among marked (b, y).
        let mut changed = true;
        while changed {
            changed = false;
            let mut best = [-1i64; 2];
            if kind == SingleParent::OnePlusOneEa {
                for (idx, &r) in reach.iter().enumerate() {
                    if r {
                        let (prev, mask) = split(idx, n);
                        let b = usize::from(prev);
                        best[b] = best[b].max(i64::from(mask.count_ones()));
                    }
                }
            }
            for &idx in &order {
                if reach[idx] {
                    continue;
                }
                let (prev, mask) = split(idx, n);
                let incumbent = value(w, prev, mask);
                let first = mask & 1 == 1;
                let hit = match kind {
                    SingleParent::Rls => (0..n).any(|i| {
                        let child = mask ^ (1 << i);
                        value(w, first, child) >= incumbent && reach[join(first, child, n)]
                    }),
                    SingleParent::OnePlusOneEa => {
                        let threshold = incumbent - if first { w } else { 0 };
                        best[usize::from(first)] >= threshold
                    }
                };
                if hit {
                    reach[idx] = true;
                    changed = true;
                    if kind == SingleParent::OnePlusOneEa {
                        let b = usize::from(prev);
                        best[b] = best[b].max(i64::from(mask.count_ones()));
                    }
                }
            }
        }
        Ok(Self {
            kind,
            w,
            n,
            reaches_optimum: reach,
        })
    }

    pub fn reaches_optimum(&self, prev_first: bool, current: &BitString) -> bool {
        self.reaches_optimum[join(prev_first, to_mask(current), self.n)]
    }

    pub fn is_doomed(&self, prev_first: bool, current: &BitString) -> bool {
        !self.reaches_optimum(prev_first, current)
    }

    /// Calls `f` on every full state.
    pub fn for_each_state(&self, mut f: impl FnMut(&TLState)) {
        for idx in 0..self.reaches_optimum.len() {
            let (prev, mask) = split(idx, self.n);
            let x = BitString::from_mask(u64::from(mask), self.n).expect("n >= 2");
            f(&TLState::new(prev, x));
        }
    }

    /// Doomed states that `classify` does not recognise.
    pub fn unclassified_doomed(&self) -> Vec<TLState> {
        let mut out = Vec::new();
        let w = Weight::new(self.w).expect("validated weight");
        self.for_each_state(|s| {
            if self.is_doomed(s.prev_first, &s.current) && classify(self.kind, w, s).is_none() {
                out.push(s.clone());
            }
        });
        out
    }

    /// Absorbing non-optimal states that `classify` does not recognise.
    pub fn unclassified_absorbing(&self) -> Vec<TLState> {
        let mut out = Vec::new();
        let w = Weight::new(self.w).expect("validated weight");
        self.for_each_state(|s| {
            let mask = to_mask(&s.current);
            if is_absorbing_mask(self.kind, self.w, self.n, s.prev_first, mask)
                && classify(self.kind, w, s).is_none()
            {
                out.push(s.clone());
            }
        });
        out
    }
}

#[inline]
fn split(idx: usize, n: usize) -> (bool, u32) {
    (idx >> n & 1 == 1, (idx & ((1 << n) - 1)) as u32)
}

#[inline]
fn join(prev: bool, mask: u32, n: usize) -> usize {
    (usize::from(prev) << n) | mask as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: i64) -> Weight {
        Weight::new(v).unwrap()
    }

    fn st(prev: bool, x: &str) -> TLState {
        TLState::new(prev, x.parse().unwrap())
    }

    const EA: SingleParent = SingleParent::OnePlusOneEa;
    const RLS: SingleParent = SingleParent::Rls;

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(EA, w(-6), &st(false, "110111")),
            Some(StagnationEvent::EventI)
        );
        assert_eq!(
            classify(EA, w(-2), &st(true, "1111")),
            Some(StagnationEvent::EventII)
        );
        assert_eq!(
            classify(RLS, w(-2), &st(true, "1111")),
            Some(StagnationEvent::EventII)
        );
        assert_eq!(
            classify(EA, w(3), &st(true, "011111")),
            Some(StagnationEvent::EventIII)
        );
        // Rest ones 3 is below [4..5].
        assert_eq!(classify(EA, w(3), &st(true, "010011")), None);
        assert_eq!(
            classify(RLS, w(3), &st(true, "000000")),
            Some(StagnationEvent::EventIII)
        );
    }

    #[test]
    fn weight_one_never_event_three() {
        for n in 2..=10 {
            for kind in SingleParent::ALL {
                for prev in [false, true] {
                    for cur in [false, true] {
                        for k in 0..n {
                            assert_ne!(
                                classify_counts(kind, w(1), n, prev, cur, k),
                                Some(StagnationEvent::EventIII)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_intervals_give_none() {
        // w = -1: EA interval [n-1 .. n-2] is empty; RLS needs w <= -2.
        for kind in SingleParent::ALL {
            for k in 0..=4 {
                assert_eq!(classify_counts(kind, w(-1), 6, false, true, k), None);
            }
        }
    }

    #[test]
    fn below_minus_n_event_one_is_first_bit_pattern_only() {
        let n = 8;
        for wv in [-8, -9, -30] {
            for k in 0..=n - 2 {
                assert_eq!(
                    classify_counts(EA, w(wv), n, false, true, k),
                    Some(StagnationEvent::EventI)
                );
            }
        }
    }

    #[test]
    fn oracle_examples() {
        // A zero flip ties and is accepted.
        assert!(!is_absorbing_oracle(RLS, w(-1), &st(false, "101100")).unwrap());
        assert!(is_absorbing_oracle(RLS, w(-2), &st(false, "101100")).unwrap());
        assert!(is_absorbing_oracle(EA, w(-3), &st(true, "11111")).unwrap());
        let too_big = TLState::new(false, BitString::zeros(17).unwrap());
        assert!(matches!(
            is_absorbing_oracle(RLS, w(0), &too_big),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn weight_zero_has_no_absorbing_states() {
        for n in 2..=8 {
            for kind in SingleParent::ALL {
                let oracle = ReachabilityOracle::new(kind, w(0), n).unwrap();
                oracle.for_each_state(|s| {
                    assert!(!is_absorbing_oracle(kind, w(0), s).unwrap(), "{s:?}");
                    assert!(!oracle.is_doomed(s.prev_first, &s.current), "{s:?}");
                });
            }
        }
    }

    #[test]
    fn classify_is_sound_on_small_grid() {
        for n in 2..=7 {
            for wv in -9..=9 {
                for kind in SingleParent::ALL {
                    let oracle = ReachabilityOracle::new(kind, w(wv), n).unwrap();
                    oracle.for_each_state(|s| {
                        if classify(kind, w(wv), s).is_some() {
                            assert!(
                                is_absorbing_oracle(kind, w(wv), s).unwrap(),
                                "{kind} w={wv} {s:?}"
                            );
                            assert!(oracle.is_doomed(s.prev_first, &s.current));
                            assert!(!crate::problem::is_global_optimum(w(wv), s));
                        }
                    });
                }
            }
        }
    }

    #[test]
    fn rls_weight_minus_one_zero_one_pattern_is_doomed_but_not_absorbing() {
        // Under RLS with w = -1 the state keeps moving through (1,1) patterns
        // towards Event II, so it is doomed without being a fixed point.
        let oracle = ReachabilityOracle::new(RLS, w(-1), 6).unwrap();
        let s = st(false, "101100");
        assert!(oracle.is_doomed(s.prev_first, &s.current));
        assert!(!is_absorbing_oracle(RLS, w(-1), &s).unwrap());
        assert!(!oracle.unclassified_doomed().is_empty());
    }
}
