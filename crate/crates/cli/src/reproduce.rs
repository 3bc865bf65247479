//! Preset experiments with pass/fail verdicts. Each preset checks one
//! published claim about the benchmark against the exact chain or against
//! seeded Monte Carlo runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use tlom_core::algorithms::mu_plus_one_snapshots;
use tlom_core::markov::absorption_probabilities;
use tlom_core::montecarlo::{estimate, runtime_scaling, wilson_ci};
use tlom_core::{run_trial, AlgorithmKind, ExperimentConfig, Result, SingleParent, Weight};

/// Success fraction measured by the pilot run of the (mu+1) EA preset.
pub const MU_PLUS_ONE_PINNED: f64 = 1.0;
pub const MU_PLUS_ONE_FLOOR: f64 = 0.8;
pub const MU_PLUS_ONE_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// w <= -n: both algorithms fail with probability tending to 1.
    FarNegative,
    /// -n <= w <= -1: the same, with a weaker bound.
    Negative,
    /// RLS with w >= 2 fails with probability 1/4 + O(1/n).
    RlsPositive,
    /// w in {0, 1}: the optimum is reached with probability 1.
    ZeroOne,
    /// Mean successful runtime grows like n ln n for w in {0, 1, 2}.
    RuntimeShape,
    /// (mu+1) EA with mu = 4n at w <= -n mostly succeeds.
    MuPlusOne,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::FarNegative,
        Preset::Negative,
        Preset::RlsPositive,
        Preset::ZeroOne,
        Preset::RuntimeShape,
        Preset::MuPlusOne,
    ];

    pub fn from_theorem(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.theorem().to_string() == s)
            .ok_or_else(|| format!("unknown preset {s:?}; expected one of 4, 5, 7, 8, 9, 10"))
    }

    pub fn theorem(self) -> u8 {
        match self {
            Preset::FarNegative => 4,
            Preset::Negative => 5,
            Preset::RlsPositive => 7,
            Preset::ZeroOne => 8,
            Preset::RuntimeShape => 9,
            Preset::MuPlusOne => 10,
        }
    }

    pub fn claim(self) -> &'static str {
        match self {
            Preset::FarNegative => "for w <= -n, RLS and the (1+1) EA miss the optimum with probability 1 - o(1)",
            Preset::Negative => "for -n <= w <= -1, RLS and the (1+1) EA miss the optimum with probability 1 - o(1)",
            Preset::RlsPositive => "for w >= 2, RLS stagnates with probability in [1/4, 1/4 + 3/(4n)]",
            Preset::ZeroOne => "for w in {0, 1}, RLS and the (1+1) EA reach the optimum with probability 1",
            Preset::RuntimeShape => "for w in {0, 1, 2}, successful runs take Theta(n ln n) generations",
            Preset::MuPlusOne => "for w <= -n, the (mu+1) EA with mu = cn reaches the optimum with probability 1 - o(1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: u8,
    pub claim: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset {}: {}", self.theorem, self.claim)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: measured {:.6}, expected {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.expected
            )?;
        }
        writeln!(f, "verdict: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

fn w(v: i64) -> Result<Weight> {
    Weight::new(v)
}

fn check(name: String, measured: f64, expected: String, passed: bool) -> Check {
    Check {
        name,
        measured,
        expected,
        passed,
    }
}

/// Lower bound on the failure probability for w <= -n.
pub fn far_negative_bound(n: usize) -> f64 {
    let nf = n as f64;
    let c = nf.cbrt();
    let e = std::f64::consts::E;
    1.0 - (nf + 1.0) * (-c / e).exp() - (e + 1.0) / c - 17.0 * nf.log2() / nf
}

/// Lower bound on the failure probability for -n <= w <= -1.
pub fn negative_bound(n: usize) -> f64 {
    let nf = n as f64;
    let c = nf.cbrt();
    1.0 - nf * (-c / std::f64::consts::E).exp() - 4.0 / c
}

fn failure(kind: SingleParent, wv: i64, n: usize) -> Result<f64> {
    Ok(absorption_probabilities(kind, w(wv)?, n)?.overall.failure())
}

/// Failure at w = -n is non-decreasing in n and above `bound` wherever the
/// bound is positive.
fn failure_series(
    kind: SingleParent,
    ns: &[usize],
    bound: fn(usize) -> f64,
    out: &mut Vec<Check>,
) -> Result<()> {
    let mut prev = 0.0;
    for &n in ns {
        let fail = failure(kind, -(n as i64), n)?;
        let b = bound(n);
        out.push(check(
            format!("{kind} n={n} w=-n failure"),
            fail,
            format!(">= {prev:.6} (previous n), >= bound {b:.3} if positive"),
            fail >= prev && (b <= 0.0 || fail >= b),
        ));
        prev = fail;
    }
    Ok(())
}

fn far_negative(out: &mut Vec<Check>) -> Result<()> {
    let ns = [20, 40, 80, 160];
    for kind in SingleParent::ALL {
        failure_series(kind, &ns, far_negative_bound, out)?;
        let n = 40;
        let base = absorption_probabilities(kind, w(-40)?, n)?;
        let other = absorption_probabilities(kind, w(-80)?, n)?;
        let d = base.max_abs_diff(&other);
        out.push(check(
            format!("{kind} n=40 |w=-n minus w=-2n|"),
            d,
            "<= 1e-12".into(),
            d <= 1e-12,
        ));
    }
    Ok(())
}

fn negative(out: &mut Vec<Check>) -> Result<()> {
    failure_series(
        SingleParent::OnePlusOneEa,
        &[20, 40, 80, 160],
        negative_bound,
        out,
    )?;
    let n = 80;
    let floor = negative_bound(n).max(0.0);
    for kind in SingleParent::ALL {
        for wv in [-1, -40, -80] {
            let fail = failure(kind, wv, n)?;
            out.push(check(
                format!("{kind} n={n} w={wv} failure"),
                fail,
                format!(">= {floor:.3}"),
                fail >= floor,
            ));
        }
    }
    Ok(())
}

fn rls_positive(out: &mut Vec<Check>, workers: usize) -> Result<()> {
    for n in [10usize, 50, 200] {
        let nf = n as f64;
        let (lo, hi) = (0.25, 0.25 + 3.0 / (4.0 * nf));
        for wv in [2, 5, n as i64] {
            let fail = failure(SingleParent::Rls, wv, n)?;
            out.push(check(
                format!("rls n={n} w={wv} failure"),
                fail,
                format!(
                    "in [{lo}, {hi:.6}] and 1/4 + 1/(2n) = {:.6}",
                    0.25 + 0.5 / nf
                ),
                (lo..=hi).contains(&fail) && (fail - 0.25 - 0.5 / nf).abs() <= 1e-10,
            ));
        }
    }
    let n = 100;
    let exact = 1.0 - failure(SingleParent::Rls, 2, n)?;
    let cfg = ExperimentConfig {
        workers,
        ..ExperimentConfig::new(AlgorithmKind::Rls, n, w(2)?, 10_000, 7)
    };
    let r = estimate(&cfg)?;
    let (lo, hi) = wilson_ci(r.successes, r.trials, 3.0)?;
    out.push(check(
        format!("rls n={n} w=2 Monte Carlo success ({} trials)", r.trials),
        r.p_success,
        format!("z=3 interval [{lo:.4}, {hi:.4}] covers exact {exact:.6}"),
        (lo..=hi).contains(&exact) && r.undecided == 0,
    ));
    Ok(())
}

fn zero_one(out: &mut Vec<Check>, workers: usize) -> Result<()> {
    for kind in SingleParent::ALL {
        for wv in [0, 1] {
            for n in [10, 50, 200] {
                let p = absorption_probabilities(kind, w(wv)?, n)?.overall.optimum;
                out.push(check(
                    format!("{kind} n={n} w={wv} P(optimum)"),
                    p,
                    "1 +- 1e-10".into(),
                    (p - 1.0).abs() <= 1e-10,
                ));
            }
        }
    }
    let cfg = ExperimentConfig {
        workers,
        ..ExperimentConfig::new(AlgorithmKind::OnePlusOneEa, 50, w(0)?, 1000, 0)
    };
    let r = estimate(&cfg)?;
    out.push(check(
        format!("ea n=50 w=0 Monte Carlo success ({} trials)", r.trials),
        r.p_success,
        "1".into(),
        r.successes == r.trials,
    ));
    Ok(())
}

fn runtime_shape(out: &mut Vec<Check>, workers: usize) -> Result<()> {
    let ns = [64usize, 128, 256, 512];
    for kind in [AlgorithmKind::Rls, AlgorithmKind::OnePlusOneEa] {
        for wv in [0, 1, 2] {
            let rows = runtime_scaling(kind, w(wv)?, &ns, 200, 77, workers)?;
            let ratios: Vec<f64> = rows
                .iter()
                .map(|r| {
                    let n = r.n as f64;
                    r.mean_success_generations.unwrap_or(f64::NAN) / (n * n.ln())
                })
                .collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(0.0, f64::max);
            let spread = hi / lo;
            out.push(check(
                format!("{kind} w={wv} max/min of mean/(n ln n) over n=64..512"),
                spread,
                "< 2".into(),
                spread < 2.0,
            ));
        }
    }
    Ok(())
}

fn mu_plus_one(out: &mut Vec<Check>, workers: usize) -> Result<()> {
    let (n, mu) = (30usize, 120usize);
    let kind = AlgorithmKind::MuPlusOneEa { mu };
    let cfg = ExperimentConfig {
        budget: (50 * mu * n) as u64,
        workers,
        ..ExperimentConfig::new(kind, n, w(-30)?, 200, 10)
    };
    let r = estimate(&cfg)?;
    out.push(check(
        format!("mu-ea n={n} mu={mu} w=-n success ({} trials)", r.trials),
        r.p_success,
        format!(">= {MU_PLUS_ONE_FLOOR} and within {MU_PLUS_ONE_SLACK} of {MU_PLUS_ONE_PINNED}"),
        r.p_success >= MU_PLUS_ONE_FLOOR
            && (r.p_success - MU_PLUS_ONE_PINNED).abs() <= MU_PLUS_ONE_SLACK,
    ));
    let mut identical = 0;
    for seed in 0..20 {
        let same = mu_plus_one_snapshots(mu, w(-30)?, n, 2_000, seed)?
            == mu_plus_one_snapshots(mu, w(-60)?, n, 2_000, seed)?
            && run_trial(kind, w(-30)?, n, cfg.budget, seed)?
                == run_trial(kind, w(-60)?, n, cfg.budget, seed)?;
        identical += u32::from(same);
    }
    out.push(check(
        "mu-ea seeded runs identical at w=-n and w=-2n".into(),
        f64::from(identical),
        "20 of 20".into(),
        identical == 20,
    ));
    Ok(())
}

/// Runs a preset. Trial parallelism follows `workers` (0 = one per CPU).
pub fn run_preset(preset: Preset, workers: usize) -> Result<Report> {
    let mut checks = Vec::new();
    match preset {
        Preset::FarNegative => far_negative(&mut checks)?,
        Preset::Negative => negative(&mut checks)?,
        Preset::RlsPositive => rls_positive(&mut checks, workers)?,
        Preset::ZeroOne => zero_one(&mut checks, workers)?,
        Preset::RuntimeShape => runtime_shape(&mut checks, workers)?,
        Preset::MuPlusOne => mu_plus_one(&mut checks, workers)?,
    }
    Ok(Report {
        theorem: preset.theorem(),
        claim: preset.claim().to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
