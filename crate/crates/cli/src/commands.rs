use std::io::Write;

use serde::{Deserialize, Serialize};

use tlom_core::markov::{absorption_probabilities, conditional_hitting_time};
use tlom_core::montecarlo::{default_budget, estimate as run_estimate, runtime_scaling};
use tlom_core::verify::{
    check_mutation_facts, check_rank_equivalence, check_selection_equivalence, LemmaReport,
};
use tlom_core::{run_trial_traced, ExperimentConfig, SingleParent, TrialResult, Weight};

use crate::args::{
    EstimateArgs, ExactArgs, Format, Lemma, ReportFormat, ReproduceArgs, ScalingArgs, TraceArgs,
    VerifyArgs,
};
use crate::output::{
    write_csv, write_json, Envelope, EstimateRow, ExactRow, ScalingCsvRow, TraceRow, VerifyRow,
};
use crate::reproduce::{run_preset, Preset};
use crate::Failure;

type Outcome = Result<bool, Failure>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub algo: SingleParent,
    pub n: usize,
    pub w: i64,
    pub per_state: bool,
    pub hitting_times: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub lemma: String,
    pub n: usize,
    pub weights: Vec<i64>,
    pub members: usize,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub algo: String,
    pub w: i64,
    pub ns: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub algo: SingleParent,
    pub n: usize,
    pub w: i64,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceConfig {
    pub theorem: u8,
}

fn usage(m: String) -> Failure {
    Failure::Usage(m)
}

pub fn estimate(a: &EstimateArgs, out: &mut dyn Write) -> Outcome {
    let kind = a.algo.kind().map_err(usage)?;
    let mut cfg = ExperimentConfig::new(kind, a.n, Weight::new(a.w)?, a.trials, a.seed);
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    cfg.workers = a.workers;
    let r = run_estimate(&cfg)?;
    match a.format {
        Format::Json => write_json(out, &Envelope::new("estimate", &cfg, &r))?,
        Format::Csv => write_csv(
            out,
            &[EstimateRow {
                algo: kind.id(),
                n: cfg.n,
                w: a.w,
                trials: r.trials,
                budget: cfg.budget,
                seed: cfg.master_seed,
                successes: r.successes,
                event1: r.event1,
                event2: r.event2,
                event3: r.event3,
                undecided: r.undecided,
                p_success: r.p_success,
                ci_low: r.ci_low,
                ci_high: r.ci_high,
                mean_gen: r.mean_success_generations,
            }],
        )?,
    }
    Ok(true)
}

pub fn exact(a: &ExactArgs, out: &mut dyn Write) -> Outcome {
    let kind = a.algo.single_parent("exact").map_err(usage)?;
    if a.format == Format::Csv && (a.per_state || a.hitting_times) {
        return Err(usage(
            "--per-state and --hitting-times require --format json".into(),
        ));
    }
    let w = Weight::new(a.w)?;
    let mut r = absorption_probabilities(kind, w, a.n)?;
    if a.hitting_times {
        let mut h = conditional_hitting_time(kind, w, a.n)?;
        if !a.per_state {
            h.per_state.clear();
        }
        r.hitting_times = Some(h);
    }
    if !a.per_state {
        r.per_state.clear();
    }
    match a.format {
        Format::Json => {
            let cfg = ExactConfig {
                algo: kind,
                n: a.n,
                w: a.w,
                per_state: a.per_state,
                hitting_times: a.hitting_times,
            };
            write_json(out, &Envelope::new("exact", cfg, &r))?
        }
        Format::Csv => write_csv(
            out,
            &[ExactRow {
                algo: kind.id(),
                n: a.n,
                w: a.w,
                p_opt: r.overall.optimum,
                p_event1: r.overall.event1,
                p_event2: r.overall.event2,
                p_event3: r.overall.event3,
            }],
        )?,
    }
    Ok(true)
}

pub fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let n = a.n as i64;
    let weights = if a.weights.is_empty() {
        vec![-n - 1, -2 * n, -10 * n]
    } else {
        a.weights.clone()
    };
    let wants = |l: Lemma| a.lemma == l || a.lemma == Lemma::All;
    let mut reports: Vec<LemmaReport> = Vec::new();
    if wants(Lemma::Facts) {
        reports.push(check_mutation_facts(a.n)?);
    }
    if wants(Lemma::Selection) {
        reports.push(check_selection_equivalence(a.n, &weights, a.seed)?);
    }
    if wants(Lemma::Ranks) {
        reports.push(check_rank_equivalence(
            a.n, a.members, a.samples, &weights, a.seed,
        )?);
    }
    match a.format {
        Format::Json => {
            let cfg = VerifyConfig {
                lemma: format!("{:?}", a.lemma).to_lowercase(),
                n: a.n,
                weights,
                members: a.members,
                samples: a.samples,
                seed: a.seed,
            };
            write_json(out, &Envelope::new("verify", cfg, &reports))?
        }
        Format::Csv => {
            let rows: Vec<VerifyRow> = reports
                .iter()
                .map(|r| VerifyRow {
                    lemma: &r.lemma,
                    n: a.n,
                    instances: r.instances,
                    violations: r.violations,
                    worst_margin: r.worst_margin,
                    passed: r.passed,
                })
                .collect();
            write_csv(out, &rows)?
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}

pub fn scaling(a: &ScalingArgs, out: &mut dyn Write) -> Outcome {
    let kind = a.algo.kind().map_err(usage)?;
    let rows = runtime_scaling(kind, Weight::new(a.w)?, &a.ns, a.trials, a.seed, a.workers)?;
    match a.format {
        Format::Json => {
            let cfg = ScalingConfig {
                algo: kind.id().to_string(),
                w: a.w,
                ns: a.ns.clone(),
                trials: a.trials,
                seed: a.seed,
            };
            write_json(out, &Envelope::new("scaling", cfg, &rows))?
        }
        Format::Csv => {
            let csv_rows: Vec<ScalingCsvRow> = rows
                .iter()
                .map(|r| ScalingCsvRow {
                    n: r.n,
                    mean_success_generations: r.mean_success_generations,
                    std: r.std,
                    successes: r.successes,
                })
                .collect();
            write_csv(out, &csv_rows)?
        }
    }
    Ok(true)
}

fn event_label(r: &TrialResult) -> &'static str {
    match r {
        TrialResult::OptimumReached { .. } => "optimum",
        TrialResult::Stagnated { event, .. } => event.id(),
        TrialResult::BudgetExhausted { .. } => "budget",
    }
}

pub fn trace(a: &TraceArgs, out: &mut dyn Write) -> Outcome {
    let kind = a.algo.single_parent("trace").map_err(usage)?;
    let budget = a.budget.unwrap_or_else(|| default_budget(a.n));
    let mut records = Vec::new();
    run_trial_traced(kind, Weight::new(a.w)?, a.n, budget, a.seed, |r| {
        records.push(r.clone())
    })?;
    match a.format {
        Format::Json => {
            let cfg = TraceConfig {
                algo: kind,
                n: a.n,
                w: a.w,
                seed: a.seed,
                budget,
            };
            write_json(out, &Envelope::new("trace", cfg, &records))?
        }
        Format::Csv => {
            let rows: Vec<TraceRow> = records
                .iter()
                .map(|r| TraceRow {
                    g: r.g,
                    t: r.t,
                    prev_first: u8::from(r.prev_first),
                    current: r.current.to_string(),
                    fitness: r.fitness.0,
                    accepted: r.accepted,
                    event: r.result.as_ref().map(event_label).unwrap_or(""),
                })
                .collect();
            write_csv(out, &rows)?
        }
    }
    Ok(true)
}

pub fn reproduce(a: &ReproduceArgs, out: &mut dyn Write) -> Outcome {
    let preset = Preset::from_theorem(&a.theorem).map_err(usage)?;
    let report = run_preset(preset, a.workers)?;
    match a.format {
        ReportFormat::Json => {
            let cfg = ReproduceConfig {
                theorem: preset.theorem(),
            };
            write_json(out, &Envelope::new("reproduce", cfg, &report))?
        }
        ReportFormat::Text => write!(out, "{report}")?,
    }
    Ok(report.passed)
}
