//! Parallel seeded trials, Wilson intervals and runtime-scaling tables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run_trial, AlgorithmKind, TrialResult};
use crate::error::{Error, Result};
use crate::problem::Weight;
use crate::stagnation::StagnationEvent;

/// Rows of a scaling table with fewer successes than this are flagged.
pub const MIN_SUCCESSES: u64 = 30;

/// `ceil(100 n ln n)`, an order of magnitude above the n ln n conditional
/// runtime of the convergent cases.
pub fn default_budget(n: usize) -> u64 {
    let n = n as f64;
    (100.0 * n * n.ln()).ceil().max(1.0) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub kind: AlgorithmKind,
    pub n: usize,
    pub w: Weight,
    pub trials: u64,
    pub budget: u64,
    pub master_seed: u64,
    /// Worker threads; 0 picks the number of CPUs. Has no effect on results.
    #[serde(default, skip_serializing)]
    pub workers: usize,
    pub z: f64,
}

impl ExperimentConfig {
    /// Config with the default budget, z = 1.96 and automatic worker count.
    pub fn new(kind: AlgorithmKind, n: usize, w: Weight, trials: u64, master_seed: u64) -> Self {
        Self {
            kind,
            n,
            w,
            trials,
            budget: default_budget(n),
            master_seed,
            workers: 0,
            z: 1.96,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if self.n < 2 {
            return Err(Error::LengthTooSmall(self.n));
        }
        if self.trials == 0 {
            return Err(Error::ZeroTrials);
        }
        if self.budget == 0 {
            return Err(Error::ZeroBudget);
        }
        if !self.z.is_finite() || self.z <= 0.0 {
            return Err(Error::InvalidZ(self.z));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub trials: u64,
    pub successes: u64,
    pub event1: u64,
    pub event2: u64,
    pub event3: u64,
    /// Trials that hit the budget without reaching the optimum or a proven event.
    pub undecided: u64,
    pub p_success: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Stagnations over trials.
    pub p_failure_pessimistic: f64,
    /// Stagnations plus undecided over trials.
    pub p_failure_optimistic: f64,
    pub mean_success_generations: Option<f64>,
    pub median_success_generations: Option<f64>,
    pub wall_time_ms: u64,
}

impl EstimateResult {
    pub fn stagnations(&self) -> u64 {
        self.event1 + self.event2 + self.event3
    }
}

/// Seed of trial `i`: a SplitMix64 finalizer over the master seed and index.
pub fn seed_for(master_seed: u64, i: u64) -> u64 {
    let mut z = master_seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

fn run_all(cfg: &ExperimentConfig, master_seed: u64) -> Result<Vec<TrialResult>> {
    pool(cfg.workers)?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                run_trial(cfg.kind, cfg.w, cfg.n, cfg.budget, seed_for(master_seed, i))
                    .map(|o| o.result)
            })
            .collect()
    })
}

fn median(sorted: &[u64]) -> Option<f64> {
    let m = sorted.len();
    match m {
        0 => None,
        _ if m % 2 == 1 => Some(sorted[m / 2] as f64),
        _ => Some((sorted[m / 2 - 1] as f64 + sorted[m / 2] as f64) / 2.0),
    }
}

/// Runs `cfg.trials` independent trials and aggregates them.
pub fn estimate(cfg: &ExperimentConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    let start = Instant::now();
    let results = run_all(cfg, cfg.master_seed)?;

    let mut events = [0u64; 3];
    let mut undecided = 0u64;
    let mut gens = Vec::new();
    for r in &results {
        match *r {
            TrialResult::OptimumReached { g } => gens.push(g),
            TrialResult::Stagnated { event, .. } => {
                events[match event {
                    StagnationEvent::EventI => 0,
                    StagnationEvent::EventII => 1,
                    StagnationEvent::EventIII => 2,
                }] += 1
            }
            TrialResult::BudgetExhausted { .. } => undecided += 1,
        }
    }
    let trials = cfg.trials;
    let successes = gens.len() as u64;
    let stagnations: u64 = events.iter().sum();
    let (ci_low, ci_high) = wilson_ci(successes, trials, cfg.z)?;
    let mean = (!gens.is_empty()).then(|| gens.iter().sum::<u64>() as f64 / gens.len() as f64);
    gens.sort_unstable();
    Ok(EstimateResult {
        trials,
        successes,
        event1: events[0],
        event2: events[1],
        event3: events[2],
        undecided,
        p_success: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        p_failure_pessimistic: stagnations as f64 / trials as f64,
        p_failure_optimistic: (stagnations + undecided) as f64 / trials as f64,
        mean_success_generations: mean,
        median_success_generations: median(&gens),
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Wilson score interval for `k` successes out of `total`, clamped to [0, 1].
pub fn wilson_ci(k: u64, total: u64, z: f64) -> Result<(f64, f64)> {
    if total == 0 || k > total {
        return Err(Error::InvalidProportion { k, total });
    }
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::InvalidZ(z));
    }
    let n = total as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let high = if k == total {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    Ok((low, high))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    /// Mean generations over successful trials only.
    pub mean_success_generations: Option<f64>,
    /// Sample standard deviation of the same.
    pub std: Option<f64>,
    pub successes: u64,
    pub trials: u64,
    /// Set when `successes` is below [`MIN_SUCCESSES`].
    pub low_count: bool,
}

/// Success-only runtime means per n, for w >= 0. Each n uses its own
/// derived master seed and the default budget.
pub fn runtime_scaling(
    kind: AlgorithmKind,
    w: Weight,
    ns: &[usize],
    trials: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<ScalingRow>> {
    if w.get() < 0 {
        return Err(Error::NegativeScalingWeight(w.get()));
    }
    ns.iter()
        .map(|&n| {
            let cfg = ExperimentConfig {
                workers,
                ..ExperimentConfig::new(kind, n, w, trials, master_seed)
            };
            cfg.validate()?;
            let gens: Vec<f64> = run_all(&cfg, seed_for(master_seed, n as u64))?
                .into_iter()
                .filter_map(|r| match r {
                    TrialResult::OptimumReached { g } => Some(g as f64),
                    _ => None,
                })
                .collect();
            let m = gens.len();
            let mean = (m > 0).then(|| gens.iter().sum::<f64>() / m as f64);
            let std = mean.filter(|_| m > 1).map(|mu| {
                (gens.iter().map(|g| (g - mu).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
            });
            Ok(ScalingRow {
                n,
                mean_success_generations: mean,
                std,
                successes: m as u64,
                trials,
                low_count: (m as u64) < MIN_SUCCESSES,
            })
        })
        .collect()
}
