use statrs::function::factorial::ln_binomial;

use super::solver::{absorb, Chain, Row};
use super::{
    absorbing_class, check_n, AbsorptionResult, ClassProbabilities, LumpedState, StateAbsorption,
};
use crate::algorithms::SingleParent;
use crate::error::Result;
use crate::problem::Weight;

/// Binomial(m, 1/n) pmf. The recurrence from `(1 - 1/n)^m` keeps full
/// relative precision in the terms that matter, which a log-factorial route
/// loses for small flip counts at large n. Terms are kept until they
/// underflow: dropping even astronomically small jumps can turn a slow state
/// into a spurious fixed point.
fn flip_pmf(m: usize, n: usize) -> Vec<f64> {
    let q = 1.0 - 1.0 / n as f64;
    let mut out = Vec::with_capacity(m.min(64) + 1);
    let mut term = q.powi(m as i32);
    out.push(term);
    let denom = (n - 1) as f64;
    for i in 0..m {
        let next = term * (m - i) as f64 / ((i + 1) as f64 * denom);
        if next == 0.0 {
            break;
        }
        term = next;
        out.push(term);
    }
    out
}

/// Distribution of ones among positions 2..n after standard bit mutation,
/// starting from `k` ones.
fn rest_ones_after_mutation(k: usize, n: usize) -> Vec<f64> {
    let lose = flip_pmf(k, n);
    let gain = flip_pmf(n - 1 - k, n);
    let mut out = vec![0.0; n];
    for (i, &pl) in lose.iter().enumerate() {
        for (j, &pg) in gain.iter().enumerate() {
            out[k - i + j] += pl * pg;
        }
    }
    out
}

pub(crate) fn row_indexed(kind: SingleParent, w: Weight, n: usize, s: LumpedState) -> Row {
    let parent = s.fitness(w);
    let me = s.index(n);
    let mut row: Row = Vec::new();
    let mut stay = 0.0;
    let mut push = |cur_first: bool, k: usize, p: f64| {
        if p == 0.0 {
            return;
        }
        let child = LumpedState::new(s.cur_first, cur_first, k);
        if child.fitness(w) >= parent {
            let t = child.index(n);
            if t == me {
                stay += p;
            } else {
                row.push((t, p));
            }
        } else {
            stay += p;
        }
    };
    let inv_n = 1.0 / n as f64;
    match kind {
        SingleParent::Rls => {
            push(!s.cur_first, s.k, inv_n);
            if s.k > 0 {
                push(s.cur_first, s.k - 1, s.k as f64 * inv_n);
            }
            if s.k + 1 < n {
                push(s.cur_first, s.k + 1, (n - 1 - s.k) as f64 * inv_n);
            }
        }
        SingleParent::OnePlusOneEa => {
            let rest = rest_ones_after_mutation(s.k, n);
            for (k2, &p) in rest.iter().enumerate() {
                push(s.cur_first, k2, p * (1.0 - inv_n));
                push(!s.cur_first, k2, p * inv_n);
            }
        }
    }
    if stay > 0.0 {
        row.push((me, stay));
    }
    row
}

/// Exact one-generation transition probabilities out of `s`; rejected
/// offspring mass is folded into the self-loop.
pub fn transition_row(
    kind: SingleParent,
    w: Weight,
    n: usize,
    s: LumpedState,
) -> Result<Vec<(LumpedState, f64)>> {
    check_n(n)?;
    Ok(row_indexed(kind, w, n, s)
        .into_iter()
        .map(|(t, p)| (LumpedState::from_index(t, n), p))
        .collect())
}

/// Law of the lumped state right after initialization: both first bits
/// uniform, rest ones Binomial(n - 1, 1/2).
pub fn initial_distribution(n: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    let rest: Vec<f64> = (0..n)
        .map(|k| (ln_binomial((n - 1) as u64, k as u64) - (n - 1) as f64 * ln2).exp())
        .collect();
    LumpedState::all(n).map(|s| 0.25 * rest[s.k]).collect()
}

/// Exact absorption probabilities of the lumped chain.
pub fn absorption_probabilities(
    kind: SingleParent,
    w: Weight,
    n: usize,
) -> Result<AbsorptionResult> {
    check_n(n)?;
    let states: Vec<LumpedState> = LumpedState::all(n).collect();
    let level: Vec<i64> = states.iter().map(|s| s.fitness(w)).collect();
    let absorbing: Vec<Option<usize>> = states
        .iter()
        .map(|&s| absorbing_class(kind, w, n, s))
        .collect();
    let row = |i: usize| row_indexed(kind, w, n, LumpedState::from_index(i, n));
    let label = |i: usize| LumpedState::from_index(i, n).to_string();
    let a = absorb(&Chain {
        level: &level,
        absorbing: &absorbing,
        row: &row,
        label: &label,
    })?;

    let pi = initial_distribution(n);
    let mut overall = [0.0; 4];
    for (p, h) in pi.iter().zip(&a.h) {
        for c in 0..4 {
            overall[c] += p * h[c];
        }
    }
    Ok(AbsorptionResult {
        algo: kind,
        n,
        w: w.get(),
        per_state: states
            .iter()
            .zip(&a.h)
            .map(|(&state, h)| StateAbsorption {
                state,
                probabilities: ClassProbabilities::from_array(*h),
            })
            .collect(),
        overall: ClassProbabilities::from_array(overall),
        residual: a.residual,
        lumping_spread: None,
        hitting_times: None,
    })
}
