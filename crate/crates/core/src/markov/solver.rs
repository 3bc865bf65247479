//! Absorbing-chain linear algebra shared by the lumped and full-state chains.
//!
//! Accepted offspring never lower the incumbent fitness, so transitions only
//! go to states of equal or higher fitness. Transient states are solved one
//! fitness level at a time, highest first. Each level is a dense system
//! `(D - Q) x = b` with `D` the total outflow of a state, eliminated without
//! pivoting in the style of Grassmann, Taksar and Heyman: pivots are
//! recomputed from outflow so no subtraction of nearly equal numbers occurs,
//! which keeps near-1 self-loops from eating the precision.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub(crate) const CLASSES: usize = 4;

/// Sparse transition row: `(target, probability)`, self-loop included.
pub(crate) type Row = Vec<(usize, f64)>;

pub(crate) struct Chain<'a> {
    /// Incumbent fitness of each state.
    pub level: &'a [i64],
    /// Absorbing class column for absorbing states.
    pub absorbing: &'a [Option<usize>],
    pub row: &'a (dyn Fn(usize) -> Row + Sync),
    pub label: &'a dyn Fn(usize) -> String,
}

pub(crate) struct Absorption {
    /// Per state, probability of ending in each absorbing class.
    pub h: Vec<[f64; CLASSES]>,
    /// max over transient states of |(I - Q) H - R|.
    pub residual: f64,
}

pub(crate) const RESIDUAL_TOL: f64 = 1e-10;
pub(crate) const MASS_TOL: f64 = 1e-8;
pub(crate) const RANGE_TOL: f64 = 1e-12;
pub(crate) const HITTING_RESIDUAL_TOL: f64 = 1e-8;

fn transient_levels(chain: &Chain<'_>) -> Vec<Vec<usize>> {
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (s, &lvl) in chain.level.iter().enumerate() {
        if chain.absorbing[s].is_none() {
            levels.entry(lvl).or_default().push(s);
        }
    }
    levels.into_values().rev().collect()
}

pub(crate) fn absorb(chain: &Chain<'_>) -> Result<Absorption> {
    let n_states = chain.level.len();
    let mut h = vec![[0.0; CLASSES]; n_states];
    for (s, a) in chain.absorbing.iter().enumerate() {
        if let Some(c) = *a {
            h[s][c] = 1.0;
        }
    }
    let mut residual = 0.0f64;
    let mut local = vec![usize::MAX; n_states];

    for block in transient_levels(chain) {
        let rows: Vec<Row> = block.par_iter().map(|&s| (chain.row)(s)).collect();
        let m = block.len();
        for (i, &s) in block.iter().enumerate() {
            local[s] = i;
        }
        let mut sys = LevelSystem::new(m, CLASSES);
        for (i, (&s, row)) in block.iter().zip(&rows).enumerate() {
            for &(t, p) in row {
                if t == s {
                    continue;
                }
                if chain.absorbing[t].is_none() && chain.level[t] == chain.level[s] {
                    sys.q[i * m + local[t]] += p;
                } else {
                    debug_assert!(chain.level[t] >= chain.level[s] || chain.absorbing[t].is_some());
                    sys.exit[i] += p;
                    for c in 0..CLASSES {
                        sys.rhs[i * CLASSES + c] += p * h[t][c];
                    }
                }
            }
        }
        let x = sys.solve().map_err(|i| Error::NotAbsorbed {
            state: (chain.label)(block[i]),
            mass: 0.0,
        })?;
        for (i, &s) in block.iter().enumerate() {
            h[s].copy_from_slice(&x[i * CLASSES..(i + 1) * CLASSES]);
        }
        // Residual of the original equations h(s) - sum_t P(s,t) h(t) = 0.
        for (&s, row) in block.iter().zip(&rows) {
            for c in 0..CLASSES {
                let r = h[s][c] - row.iter().map(|&(t, p)| p * h[t][c]).sum::<f64>();
                residual = residual.max(r.abs());
            }
        }
        for &s in &block {
            local[s] = usize::MAX;
        }
    }

    for (s, probs) in h.iter_mut().enumerate() {
        if chain.absorbing[s].is_some() {
            continue;
        }
        let mass: f64 = probs.iter().sum();
        if mass.is_nan() || mass < 1.0 - MASS_TOL {
            return Err(Error::NotAbsorbed {
                state: (chain.label)(s),
                mass,
            });
        }
        for v in probs.iter_mut() {
            if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(v) {
                return Err(Error::ProbabilityOutOfRange {
                    state: (chain.label)(s),
                    value: *v,
                });
            }
            *v = v.clamp(0.0, 1.0);
        }
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::Residual {
            residual,
            tolerance: RESIDUAL_TOL,
        });
    }
    Ok(Absorption { h, residual })
}

/// Dense in-level system `(diag(exit + rowsum(q)) - q) x = rhs` with `r`
/// right-hand sides, row-major.
struct LevelSystem {
    m: usize,
    r: usize,
    /// In-level transition mass, zero diagonal.
    q: Vec<f64>,
    /// Mass leaving the level (or the states still to be eliminated).
    exit: Vec<f64>,
    rhs: Vec<f64>,
}

impl LevelSystem {
    fn new(m: usize, r: usize) -> Self {
        Self {
            m,
            r,
            q: vec![0.0; m * m],
            exit: vec![0.0; m],
            rhs: vec![0.0; m * r],
        }
    }

    /// Gaussian elimination in natural order; every update adds nonnegative
    /// terms. Fails with the local index of a state that cannot leave the
    /// states remaining at its elimination step.
    fn solve(mut self) -> std::result::Result<Vec<f64>, usize> {
        let (m, r) = (self.m, self.r);
        let mut pivot = vec![0.0; m];
        for k in 0..m {
            let d = self.exit[k] + self.q[k * m + k + 1..(k + 1) * m].iter().sum::<f64>();
            if d.is_nan() || d <= 0.0 {
                return Err(k);
            }
            pivot[k] = d;
            for i in k + 1..m {
                let f = self.q[i * m + k];
                if f == 0.0 {
                    continue;
                }
                let f = f / d;
                self.q[i * m + k] = 0.0;
                self.exit[i] += f * self.exit[k];
                for j in k + 1..m {
                    if j != i {
                        self.q[i * m + j] += f * self.q[k * m + j];
                    }
                }
                for c in 0..r {
                    self.rhs[i * r + c] += f * self.rhs[k * r + c];
                }
            }
        }
        let mut x = vec![0.0; m * r];
        for k in (0..m).rev() {
            for c in 0..r {
                let mut acc = self.rhs[k * r + c];
                for j in k + 1..m {
                    acc += self.q[k * m + j] * x[j * r + c];
                }
                x[k * r + c] = acc / pivot[k];
            }
        }
        Ok(x)
    }
}

pub(crate) struct Conditioned {
    /// Expected generations to the optimum given that it is reached; `None`
    /// where the optimum has probability zero. Optimum states carry 0.
    pub tau: Vec<Option<f64>>,
    pub residual: f64,
}

/// Expected absorption time at the optimum (class column 0) conditioned on
/// absorbing there, via the Doob h-transform: transient transitions are
/// reweighted by `h(t) / h(s)` and the resulting chain's expected absorption
/// time is solved level by level.
pub(crate) fn conditioned_hitting(chain: &Chain<'_>, h_opt: &[f64]) -> Result<Conditioned> {
    let n_states = chain.level.len();
    let mut tau: Vec<Option<f64>> = (0..n_states)
        .map(|s| match chain.absorbing[s] {
            Some(0) => Some(0.0),
            _ => None,
        })
        .collect();
    let mut residual = 0.0f64;
    let mut local = vec![usize::MAX; n_states];

    for level in transient_levels(chain) {
        let block: Vec<usize> = level.into_iter().filter(|&s| h_opt[s] > 0.0).collect();
        if block.is_empty() {
            continue;
        }
        let rows: Vec<Row> = block.par_iter().map(|&s| (chain.row)(s)).collect();
        let m = block.len();
        for (i, &s) in block.iter().enumerate() {
            local[s] = i;
        }
        let mut sys = LevelSystem::new(m, 1);
        for (i, (&s, row)) in block.iter().zip(&rows).enumerate() {
            sys.rhs[i] = 1.0;
            // Exit mass is the transformed probability of leaving the level,
            // optimum absorption included; event absorption has weight zero.
            for &(t, p) in row {
                if t == s || h_opt[t] == 0.0 {
                    continue;
                }
                let q = p * h_opt[t] / h_opt[s];
                if local[t] != usize::MAX {
                    sys.q[i * m + local[t]] += q;
                } else {
                    sys.exit[i] += q;
                    if chain.absorbing[t].is_none() {
                        sys.rhs[i] += q * tau[t].expect("higher level solved first");
                    }
                }
            }
        }
        let x = sys.solve().map_err(|i| Error::NotAbsorbed {
            state: (chain.label)(block[i]),
            mass: 0.0,
        })?;
        for (i, &s) in block.iter().enumerate() {
            tau[s] = Some(x[i]);
        }
        for (&s, row) in block.iter().zip(&rows) {
            let mut r = tau[s].unwrap() - 1.0;
            for &(t, p) in row {
                if chain.absorbing[t].is_none() && h_opt[t] > 0.0 {
                    r -= p * h_opt[t] / h_opt[s] * tau[t].unwrap();
                }
            }
            residual = residual.max(r.abs() / tau[s].unwrap().max(1.0));
        }
        for &s in &block {
            local[s] = usize::MAX;
        }
    }
    if residual > HITTING_RESIDUAL_TOL {
        return Err(Error::Residual {
            residual,
            tolerance: HITTING_RESIDUAL_TOL,
        });
    }
    Ok(Conditioned { tau, residual })
}
