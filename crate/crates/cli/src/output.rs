use std::io::Write;

use serde::{Deserialize, Serialize};

pub const TOOL: &str = "tlom";

/// Metadata wrapper around every JSON result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub config: C,
    pub result: R,
}

impl<C, R> Envelope<C, R> {
    pub fn new(command: &str, config: C, result: R) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            config,
            result,
        }
    }
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

#[derive(Debug, Serialize)]
pub struct EstimateRow<'a> {
    pub algo: &'a str,
    pub n: usize,
    pub w: i64,
    pub trials: u64,
    pub budget: u64,
    pub seed: u64,
    pub successes: u64,
    pub event1: u64,
    pub event2: u64,
    pub event3: u64,
    pub undecided: u64,
    pub p_success: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_gen: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ExactRow<'a> {
    pub algo: &'a str,
    pub n: usize,
    pub w: i64,
    pub p_opt: f64,
    pub p_event1: f64,
    pub p_event2: f64,
    pub p_event3: f64,
}

#[derive(Debug, Serialize)]
pub struct ScalingCsvRow {
    pub n: usize,
    pub mean_success_generations: Option<f64>,
    pub std: Option<f64>,
    pub successes: u64,
}

#[derive(Debug, Serialize)]
pub struct VerifyRow<'a> {
    pub lemma: &'a str,
    pub n: usize,
    pub instances: u64,
    pub violations: u64,
    pub worst_margin: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct TraceRow<'a> {
    pub g: u64,
    pub t: u64,
    pub prev_first: u8,
    pub current: String,
    pub fitness: i64,
    pub accepted: bool,
    /// Empty except on the last line.
    pub event: &'a str,
}
