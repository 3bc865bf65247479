use std::process::Command;

use serde_json::Value;
use tlom_cli::commands::{ExactConfig, TraceConfig};
use tlom_cli::output::Envelope;
use tlom_cli::reproduce::Report;
use tlom_core::markov::{absorption_probabilities, brute_force_absorption};
use tlom_core::verify::LemmaReport;
use tlom_core::{
    AbsorptionResult, EstimateResult, ExperimentConfig, SingleParent, TraceRecord, Weight,
};

fn tlom(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tlom").chain(args.iter().copied());
    let code = tlom_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = tlom(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn usage_error(args: &[&str]) -> String {
    let (code, out, err) = tlom(args);
    assert_eq!(code, 2, "{args:?}");
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1, "{err}");
    err
}

/// Parses `s` as `T`, then checks that re-serializing gives the same JSON.
fn round_trip<T>(s: &str) -> T
where
    T: serde::de::DeserializeOwned + serde::Serialize,
{
    let parsed: T = serde_json::from_str(s).unwrap();
    let again: Value = serde_json::to_value(&parsed).unwrap();
    assert_eq!(again, serde_json::from_str::<Value>(s).unwrap());
    parsed
}

fn strip_volatile(s: &str) -> Value {
    let mut v: Value = serde_json::from_str(s).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("timestamp");
    if let Some(r) = obj.get_mut("result").and_then(Value::as_object_mut) {
        r.remove("wall_time_ms");
    }
    v
}

#[test]
fn estimate_rls_matches_exact_success_probability() {
    let out = ok(&[
        "estimate", "--algo", "rls", "--n", "100", "--w", "2", "--trials", "10000", "--seed", "7",
        "--format", "json",
    ]);
    let env: Envelope<ExperimentConfig, EstimateResult> = round_trip(&out);
    assert_eq!(env.command, "estimate");
    assert_eq!(env.config.master_seed, 7);
    let exact = 1.0 - (0.25 + 1.0 / 200.0);
    let r = env.result;
    let sigma = (exact * (1.0 - exact) / r.trials as f64).sqrt();
    assert!(
        (r.p_success - exact).abs() <= 3.0 * sigma,
        "{}",
        r.p_success
    );
    assert_eq!(r.undecided, 0);
}

#[test]
fn estimate_ea_at_weight_zero_always_succeeds() {
    let out = ok(&[
        "estimate", "--algo", "ea", "--n", "50", "--w", "0", "--trials", "1000",
    ]);
    let env: Envelope<ExperimentConfig, EstimateResult> = round_trip(&out);
    assert_eq!(env.result.p_success, 1.0);
}

#[test]
fn estimate_csv_schema() {
    let out = ok(&[
        "estimate", "--algo", "mu-ea", "--mu", "4", "--n", "8", "--w", "-8", "--trials", "50",
        "--format", "csv",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "algo,n,w,trials,budget,seed,successes,event1,event2,event3,undecided,p_success,ci_low,ci_high,mean_gen"
    );
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 15);
    assert_eq!(&fields[..3], &["mu-ea", "8", "-8"]);
}

#[test]
fn identical_flags_give_identical_payloads() {
    let args = [
        "estimate", "--algo", "ea", "--n", "30", "--w", "-3", "--trials", "300", "--seed", "5",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(strip_volatile(&a), strip_volatile(&b));

    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = args.to_vec();
    four.extend(["--workers", "4"]);
    assert_eq!(strip_volatile(&ok(&one)), strip_volatile(&ok(&four)));

    let csv = [
        "exact", "--algo", "rls", "--n", "12", "--w", "-2", "--format", "csv",
    ];
    assert_eq!(ok(&csv), ok(&csv));
}

#[test]
fn invalid_flags_exit_with_usage_code() {
    usage_error(&["estimate", "--algo", "rls", "--w", "2"]);
    usage_error(&["estimate", "--algo", "bogus", "--n", "5", "--w", "0"]);
    usage_error(&["estimate", "--algo", "mu-ea", "--n", "5", "--w", "0"]);
    usage_error(&[
        "estimate", "--algo", "rls", "--mu", "3", "--n", "5", "--w", "0",
    ]);
    usage_error(&["estimate", "--algo", "rls", "--n", "1", "--w", "0"]);
    usage_error(&[
        "estimate", "--algo", "rls", "--n", "5", "--w", "0", "--trials", "0",
    ]);
    usage_error(&["frobnicate"]);
}

#[test]
fn exact_matches_full_state_chain() {
    let out = ok(&[
        "exact",
        "--algo",
        "ea",
        "--n",
        "8",
        "--w",
        "-8",
        "--per-state",
    ]);
    let env: Envelope<ExactConfig, AbsorptionResult> = round_trip(&out);
    assert_eq!(env.result.per_state.len(), 32);
    let brute =
        brute_force_absorption(SingleParent::OnePlusOneEa, Weight::new(-8).unwrap(), 8).unwrap();
    assert!(env.result.max_abs_diff(&brute) <= 1e-10);
}

#[test]
fn exact_csv_rls_failure() {
    let out = ok(&[
        "exact", "--algo", "rls", "--n", "20", "--w", "3", "--format", "csv",
    ]);
    let mut rows = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(
        rows.headers().unwrap(),
        vec!["algo", "n", "w", "p_opt", "p_event1", "p_event2", "p_event3"]
    );
    let rec = rows.records().next().unwrap().unwrap();
    let fail: f64 = (4..7).map(|i| rec[i].parse::<f64>().unwrap()).sum();
    assert!((fail - 0.275).abs() <= 1e-10, "{fail}");
}

#[test]
fn exact_weight_zero_and_hitting_times() {
    let out = ok(&[
        "exact",
        "--algo",
        "ea",
        "--n",
        "10",
        "--w",
        "0",
        "--hitting-times",
    ]);
    let env: Envelope<ExactConfig, AbsorptionResult> = round_trip(&out);
    assert!((env.result.overall.optimum - 1.0).abs() <= 1e-10);
    assert!(env.result.per_state.is_empty());
    let h = env.result.hitting_times.unwrap();
    assert!(h.per_state.is_empty());
    assert!(h.overall > 10.0 && h.overall < 100.0, "{}", h.overall);
}

#[test]
fn exact_rejects_population_algorithm_and_csv_extras() {
    usage_error(&[
        "exact", "--algo", "mu-ea", "--mu", "4", "--n", "8", "--w", "0",
    ]);
    usage_error(&[
        "exact",
        "--algo",
        "rls",
        "--n",
        "8",
        "--w",
        "0",
        "--per-state",
        "--format",
        "csv",
    ]);
}

#[test]
fn verify_default_grid_passes() {
    let out = ok(&["verify", "--lemma", "all", "--n", "8"]);
    let env: Envelope<Value, Vec<LemmaReport>> = round_trip(&out);
    assert_eq!(env.result.len(), 3);
    assert!(env.result.iter().all(|r| r.passed && r.violations == 0));
}

#[test]
fn verify_rank_ties_at_minus_n_fail_with_exit_one() {
    let (code, out, _) = tlom(&[
        "verify",
        "--lemma",
        "ranks",
        "--n",
        "6",
        "--weights",
        "-6,-7,-60",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 1);
    let last = out.lines().last().unwrap();
    assert!(
        last.starts_with("rank-equivalence,6,") && last.ends_with(",false"),
        "{last}"
    );
}

#[test]
fn scaling_emits_one_row_per_size() {
    let out = ok(&[
        "scaling",
        "--algo",
        "ea",
        "--w",
        "1",
        "--ns",
        "64,128,256",
        "--trials",
        "200",
        "--seed",
        "3",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,mean_success_generations,std,successes");
    assert_eq!(lines.len(), 4);
    usage_error(&["scaling", "--algo", "ea", "--w", "-1", "--ns", "64"]);
}

#[test]
fn trace_ends_in_a_terminal_line() {
    let out = ok(&[
        "trace", "--algo", "rls", "--n", "6", "--w", "-6", "--seed", "1",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "g,t,prev_first,current,fitness,accepted,event");
    let last = lines.last().unwrap().rsplit(',').next().unwrap();
    assert!(
        ["optimum", "event1", "event2", "event3"].contains(&last),
        "{last}"
    );
    for l in &lines[1..lines.len() - 1] {
        assert!(l.ends_with(','), "{l}");
    }

    let json = ok(&[
        "trace", "--algo", "ea", "--n", "6", "--w", "2", "--seed", "4", "--format", "json",
    ]);
    let env: Envelope<TraceConfig, Vec<TraceRecord>> = round_trip(&json);
    assert!(env.result.last().unwrap().result.is_some());

    usage_error(&[
        "trace", "--algo", "mu-ea", "--mu", "3", "--n", "6", "--w", "-6",
    ]);
}

#[test]
fn reproduce_presets() {
    let (code, out, _) = tlom(&["reproduce", "--theorem", "8", "--format", "json"]);
    assert_eq!(code, 0);
    let env: Envelope<Value, Report> = round_trip(&out);
    assert!(env.result.passed);

    let text = ok(&["reproduce", "--theorem", "7"]);
    assert!(text.contains("measured 0.252500"), "{text}");
    assert!(text.trim_end().ends_with("verdict: PASS"));

    usage_error(&["reproduce", "--theorem", "6"]);
}

#[test]
fn binary_reads_workers_from_environment() {
    let bin = env!("CARGO_BIN_EXE_tlom");
    let run = |workers: &str| {
        Command::new(bin)
            .args([
                "exact", "--algo", "rls", "--n", "6", "--w", "0", "--format", "csv",
            ])
            .env("TLOM_WORKERS", workers)
            .output()
            .unwrap()
    };
    assert!(run("2").status.success());
    let bad = Command::new(bin)
        .args(["estimate", "--algo", "rls", "--n", "6", "--w", "0"])
        .env("TLOM_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("reproduce"));
}

#[test]
fn exact_overall_equals_library_value() {
    let out = ok(&["exact", "--algo", "ea", "--n", "15", "--w", "-3"]);
    let env: Envelope<ExactConfig, AbsorptionResult> = round_trip(&out);
    let lib =
        absorption_probabilities(SingleParent::OnePlusOneEa, Weight::new(-3).unwrap(), 15).unwrap();
    assert_eq!(env.result.overall, lib.overall);
}
