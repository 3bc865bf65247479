//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stderr
//! (bypassing the test harness capture) before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use tlom_core::algorithms::mu_plus_one_snapshots;
use tlom_core::markov::{absorption_probabilities, brute_force_absorption};
use tlom_core::montecarlo::{estimate, runtime_scaling, seed_for, wilson_ci, ExperimentConfig};
use tlom_core::problem::{is_global_optimum, TLState};
use tlom_core::stagnation::{classify, is_absorbing_oracle};
use tlom_core::verify::{
    check_mutation_facts, check_rank_equivalence, check_selection_equivalence,
};
use tlom_core::{run_trial, AlgorithmKind, BitString, SingleParent, Weight};

fn w(v: i64) -> Weight {
    Weight::new(v).unwrap()
}

fn verdict(id: &str, ok: bool, detail: &str) {
    let line = format!("[{}] {id}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn failure_lower_bound(n: usize) -> f64 {
    let n = n as f64;
    let c = n.cbrt();
    1.0 - n * (-c / std::f64::consts::E).exp() - 4.0 / c
}

const WEIGHTS_1: [i64; 7] = [-8, -3, -1, 0, 1, 2, 5];

#[test]
fn criterion_01_lumped_matches_full_state_chain() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut at = String::new();
    for kind in SingleParent::ALL {
        for n in [4, 6, 8] {
            for wv in WEIGHTS_1 {
                let l = absorption_probabilities(kind, w(wv), n).unwrap();
                let b = brute_force_absorption(kind, w(wv), n).unwrap();
                let d = l.max_abs_diff(&b);
                if d > worst || at.is_empty() {
                    worst = worst.max(d);
                    at = format!("{kind} n={n} w={wv}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && elapsed < Duration::from_secs(60);
    verdict(
        "criterion 1 (lumping oracle)",
        ok,
        &format!("max |lumped - full| = {worst:.3e} ({at}), {elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_probability_one_convergence() {
    let mut worst = 0.0f64;
    for kind in SingleParent::ALL {
        for n in [10, 50, 200] {
            for wv in [0, 1] {
                let r = absorption_probabilities(kind, w(wv), n).unwrap();
                worst = worst.max((r.overall.optimum - 1.0).abs());
            }
        }
    }
    let ok = worst <= 1e-10;
    verdict(
        "criterion 2 (w in {0,1} converges)",
        ok,
        &format!("max |P(optimum) - 1| = {worst:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_rls_failure_band_and_closed_form() {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [10usize, 50, 200] {
        let nf = n as f64;
        let closed = 0.25 + 1.0 / (2.0 * nf);
        for wv in [2, 5, n as i64] {
            let fail = absorption_probabilities(SingleParent::Rls, w(wv), n)
                .unwrap()
                .overall
                .failure();
            let in_band = (0.25..=0.25 + 3.0 / (4.0 * nf)).contains(&fail);
            let matches = (fail - closed).abs() <= 1e-10;
            ok &= in_band && matches;
            lines.push(format!("n={n} w={wv} fail={fail:.12}"));
        }
    }
    for wv in [2, 5, 10] {
        let b = brute_force_absorption(SingleParent::Rls, w(wv), 10).unwrap();
        ok &= (b.overall.failure() - 0.3).abs() <= 1e-10;
    }
    verdict(
        "criterion 3 (RLS failure band, 1/4 + 1/(2n))",
        ok,
        &lines.join("; "),
    );
    assert!(ok);
}

#[test]
fn criterion_04_negative_weight_failure_tends_to_one() {
    let start = Instant::now();
    let mut ok = true;
    let mut prev = 0.0;
    let mut lines = Vec::new();
    for n in [20usize, 40, 80, 160] {
        let fail = absorption_probabilities(SingleParent::OnePlusOneEa, w(-(n as i64)), n)
            .unwrap()
            .overall
            .failure();
        let bound = failure_lower_bound(n);
        ok &= fail >= prev && (bound <= 0.0 || fail >= bound);
        prev = fail;
        lines.push(format!("n={n} fail={fail:.6} bound={bound:.3}"));
    }
    let n = 80;
    let floor = failure_lower_bound(n).max(0.0);
    for wv in [-1, -40, -80] {
        let fail = absorption_probabilities(SingleParent::OnePlusOneEa, w(wv), n)
            .unwrap()
            .overall
            .failure();
        ok &= fail >= floor;
        lines.push(format!("n=80 w={wv} fail={fail:.6}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    verdict(
        "criterion 4 (EA, w < 0 failure)",
        ok,
        &format!("{}; {elapsed:.2?}", lines.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_05_weights_below_minus_n_are_equivalent() {
    let mut worst = 0.0f64;
    for kind in SingleParent::ALL {
        for n in [6usize, 10, 40] {
            let ni = n as i64;
            let base = absorption_probabilities(kind, w(-ni), n).unwrap();
            for wv in [-ni - 1, -2 * ni] {
                let other = absorption_probabilities(kind, w(wv), n).unwrap();
                worst = worst.max(base.max_abs_diff(&other));
            }
        }
    }
    let ok = worst <= 1e-12;
    verdict(
        "criterion 5 (w = -n, -n-1, -2n identical)",
        ok,
        &format!("max difference {worst:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_monte_carlo_calibration() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    let budget = 1_000_000;
    for wv in [-20, -1, 2] {
        let exact = absorption_probabilities(SingleParent::OnePlusOneEa, w(wv), 20)
            .unwrap()
            .overall
            .optimum;
        let cfg = ExperimentConfig {
            budget,
            ..ExperimentConfig::new(AlgorithmKind::OnePlusOneEa, 20, w(wv), 10_000, 606)
        };
        let r = estimate(&cfg).unwrap();
        let (lo, hi) = wilson_ci(r.successes, r.trials, 3.0).unwrap();
        let inside = (lo..=hi).contains(&exact) && r.undecided == 0;
        ok &= inside;
        lines.push(format!(
            "n=20 w={wv} p_hat={:.4} exact={exact:.4} z3=[{lo:.4},{hi:.4}]",
            r.p_success
        ));
    }
    for wv in [-10, -1, 2] {
        let exact = absorption_probabilities(SingleParent::OnePlusOneEa, w(wv), 10)
            .unwrap()
            .overall
            .optimum;
        let reps = 200u64;
        let covered = (0..reps)
            .filter(|&rep| {
                let cfg = ExperimentConfig {
                    budget,
                    ..ExperimentConfig::new(
                        AlgorithmKind::OnePlusOneEa,
                        10,
                        w(wv),
                        400,
                        seed_for((6_000 + wv) as u64, rep),
                    )
                };
                let r = estimate(&cfg).unwrap();
                (r.ci_low..=r.ci_high).contains(&exact)
            })
            .count() as u64;
        ok &= covered * 10 >= reps * 9;
        lines.push(format!("n=10 w={wv} coverage {covered}/{reps}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    verdict(
        "criterion 6 (Monte Carlo calibration)",
        ok,
        &format!("{}; {elapsed:.2?}", lines.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_07_conditional_runtime_shape() {
    let start = Instant::now();
    let ns = [64usize, 128, 256, 512];
    let mut ok = true;
    let mut lines = Vec::new();
    for kind in [AlgorithmKind::Rls, AlgorithmKind::OnePlusOneEa] {
        for wv in [0, 1, 2] {
            let rows = runtime_scaling(kind, w(wv), &ns, 200, 77, 0).unwrap();
            let ratios: Vec<f64> = rows
                .iter()
                .map(|r| {
                    let n = r.n as f64;
                    r.mean_success_generations.unwrap_or(f64::NAN) / (n * n.ln())
                })
                .collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(0.0, f64::max);
            ok &= hi / lo < 2.0;
            let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
            lines.push(format!("{kind} w={wv} [{}]", shown.join(",")));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    verdict(
        "criterion 7 (mean / (n ln n) within factor 2)",
        ok,
        &format!("{}; {elapsed:.2?}", lines.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_08a_mutation_facts() {
    let mut holds = true;
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for n in 4..=16 {
        let r = check_mutation_facts(n).unwrap();
        holds &= r.passed;
        if r.worst_margin < worst {
            worst = r.worst_margin;
            at = r.worst_instance.clone();
        }
    }
    let ok = holds && worst > 0.0;
    verdict(
        "criterion 8a (mutation facts, positive margins)",
        ok,
        &format!("inequalities hold: {holds}; worst margin {worst:.3e} at {at}"),
    );
    assert!(ok);
}

#[test]
fn criterion_08b_selection_equivalence() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for n in [4usize, 5, 6, 20] {
        let ni = n as i64;
        let r = check_selection_equivalence(n, &[-ni - 1, -2 * ni, -100 * ni], 8).unwrap();
        ok &= r.passed && r.worst_margin > 0.0;
        lines.push(format!(
            "n={n}: {} instances, {} violations, margin {}",
            r.instances, r.violations, r.worst_margin
        ));
    }
    ok &= start.elapsed() < Duration::from_secs(120);
    verdict(
        "criterion 8b (selection equivalence)",
        ok,
        &lines.join("; "),
    );
    assert!(ok);
}

#[test]
fn criterion_08c_rank_equivalence() {
    let r = check_rank_equivalence(6, 5, 100_000, &[-6, -7, -60], 8).unwrap();
    let ok = r.passed && r.worst_margin > 0.0;
    verdict(
        "criterion 8c (rank equivalence, w in {-6,-7,-60})",
        ok,
        &format!(
            "{} violations in {} comparisons, worst margin {}; first counterexample: {}",
            r.violations,
            r.instances,
            r.worst_margin,
            r.counterexample.as_deref().unwrap_or("none")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_stagnation_soundness() {
    let mut checked = 0u64;
    let mut unsound = Vec::new();
    for kind in SingleParent::ALL {
        for n in 4..=10usize {
            for wv in -12..=12 {
                for prev in [false, true] {
                    for mask in 0..(1u64 << n) {
                        let s = TLState::new(prev, BitString::from_mask(mask, n).unwrap());
                        if classify(kind, w(wv), &s).is_none() {
                            continue;
                        }
                        checked += 1;
                        let absorbing = is_absorbing_oracle(kind, w(wv), &s).unwrap();
                        if !absorbing || is_global_optimum(w(wv), &s) {
                            unsound.push(format!(
                                "{kind} w={wv} ({}, {})",
                                u8::from(prev),
                                s.current
                            ));
                        }
                    }
                }
            }
        }
    }
    let ok = unsound.is_empty() && checked > 0;
    verdict(
        "criterion 9 (stagnation soundness)",
        ok,
        &format!(
            "{checked} classified states checked, {} unsound{}",
            unsound.len(),
            unsound
                .first()
                .map(|s| format!(", e.g. {s}"))
                .unwrap_or_default()
        ),
    );
    assert!(ok);
}

/// Success fraction measured by the pilot run of this configuration.
const MU_PLUS_ONE_PINNED: f64 = 1.0;

#[test]
fn criterion_10_mu_plus_one_ea() {
    let (n, mu) = (30usize, 120usize);
    let kind = AlgorithmKind::MuPlusOneEa { mu };
    let cfg = ExperimentConfig {
        budget: (50 * mu * n) as u64,
        ..ExperimentConfig::new(kind, n, w(-30), 200, 10)
    };
    let r = estimate(&cfg).unwrap();
    let mut ok = r.p_success >= 0.8 && (r.p_success - MU_PLUS_ONE_PINNED).abs() <= 0.05;

    let mut identical = 0;
    for seed in 0..20 {
        let a = mu_plus_one_snapshots(mu, w(-30), n, 2_000, seed).unwrap();
        let b = mu_plus_one_snapshots(mu, w(-60), n, 2_000, seed).unwrap();
        let full_a = run_trial(kind, w(-30), n, cfg.budget, seed).unwrap();
        let full_b = run_trial(kind, w(-60), n, cfg.budget, seed).unwrap();
        if a == b && full_a == full_b {
            identical += 1;
        }
    }
    ok &= identical == 20;
    verdict(
        "criterion 10 ((mu+1) EA, w <= -n)",
        ok,
        &format!(
            "success {}/{} (pinned {MU_PLUS_ONE_PINNED}); identical trajectories w=-n vs w=-2n: {identical}/20",
            r.successes, r.trials
        ),
    );
    assert!(ok);
}
