//! Exhaustive or sampled checks of the standalone inequalities behind the
//! stagnation and population arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::binomial;

use crate::error::{Error, Result};

/// Largest n for exact mutation-fact enumeration.
pub const FACTS_MAX_N: usize = 16;
/// Largest n swept exhaustively by [`check_selection_equivalence`].
pub const SELECTION_EXHAUSTIVE_MAX_N: usize = 6;
/// Sampled triples above [`SELECTION_EXHAUSTIVE_MAX_N`].
pub const SELECTION_SAMPLES: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    /// Human-readable description of the swept parameters.
    pub grid: String,
    pub instances: u64,
    pub passed: bool,
    /// Smallest slack of any checked instance; negative or, for strict
    /// inequalities, zero slack means a violation.
    pub worst_margin: f64,
    pub worst_instance: String,
    pub violations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

struct Tracker {
    instances: u64,
    violations: u64,
    worst: f64,
    worst_at: String,
    counterexample: Option<String>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            instances: 0,
            violations: 0,
            worst: f64::INFINITY,
            worst_at: String::new(),
            counterexample: None,
        }
    }

    fn margin(&mut self, m: f64, at: impl FnOnce() -> String) {
        if m < self.worst {
            self.worst = m;
            self.worst_at = at();
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }

    fn report(self, lemma: &str, grid: String) -> LemmaReport {
        LemmaReport {
            lemma: lemma.to_string(),
            grid,
            instances: self.instances,
            passed: self.violations == 0,
            worst_margin: self.worst,
            worst_instance: self.worst_at,
            violations: self.violations,
            counterexample: self.counterexample,
        }
    }
}

/// Outcome weights of a mutation of a string with `a` zeros, scaled by n^n
/// (EA) or n (RLS) so every probability is an exact integer ratio.
/// `w[j][i]` weighs flipping exactly j zeros and i ones.
fn outcome_weights(ea: bool, n: usize, a: usize) -> Vec<Vec<u128>> {
    let mut w = vec![vec![0u128; n - a + 1]; a + 1];
    if ea {
        for (j, row) in w.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                let ways = binomial(a as u64, j as u64) as u128
                    * binomial((n - a) as u64, i as u64) as u128;
                *v = ways * ((n - 1) as u128).pow((n - i - j) as u32);
            }
        }
    } else {
        w[1][0] = a as u128;
        if n > a {
            w[0][1] = (n - a) as u128;
        }
    }
    w
}

/// Exact check of the two mutation facts for every zero count a in 1..=n
/// and both operators:
/// (a) `P(|Y| - |X| = 1 | |Y| > |X|) > 1 - e a / n`;
/// (b) `P(Y_i = 1 | |Y| - |X| = 1) >= 1 / a` for a fixed zero position i.
pub fn check_mutation_facts(n: usize) -> Result<LemmaReport> {
    if !(2..=FACTS_MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "mutation facts need 2 <= n <= {FACTS_MAX_N}, got {n}"
        )));
    }
    let mut t = Tracker::new();
    let e = std::f64::consts::E;
    for ea in [false, true] {
        let op = if ea { "ea" } else { "rls" };
        for a in 1..=n {
            let w = outcome_weights(ea, n, a);
            let mut gain_one = 0u128;
            let mut gain_any = 0u128;
            for (j, row) in w.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    if j > i {
                        gain_any += v;
                        if j == i + 1 {
                            gain_one += v;
                        }
                    }
                }
            }
            // (a)
            let lhs = gain_one as f64 / gain_any as f64;
            let m = lhs - (1.0 - e * a as f64 / n as f64);
            t.margin(m, || format!("fact (a), {op}, n={n}, a={a}"));
            t.record(m > 0.0, || {
                format!("fact (a), {op}, n={n}, a={a}: {lhs} <= 1 - e*{a}/{n}")
            });

            // (b) Restricted to outcomes flipping zero i: the other a - 1
            // zeros flip j - 1 times. Among the a zeros flipped j at a time,
            // a given one is in the flipped set with probability j / a.
            let mut with_i = 0u128;
            for (j, row) in w.iter().enumerate() {
                if j >= 1 && j - 1 < row.len() {
                    with_i += row[j - 1] * j as u128;
                }
            }
            // P(Y_i = 1 | gain one) = with_i / (a * gain_one); compare with 1/a.
            let num = with_i as i128 - gain_one as i128;
            let m = num as f64 / (a as f64 * gain_one as f64);
            t.margin(m, || format!("fact (b), {op}, n={n}, a={a}"));
            t.record(num >= 0, || {
                format!(
                    "fact (b), {op}, n={n}, a={a}: {with_i}/{} < 1/{a}",
                    a as u128 * gain_one
                )
            });
        }
    }
    Ok(t.report(
        "mutation-facts",
        format!("n={n}, a=1..{n}, operators rls+ea"),
    ))
}

fn f(w: i64, stored: bool, ones: u32) -> i64 {
    i64::from(ones) + w * i64::from(stored)
}

/// Checks that for every weight `w < -n` the comparison
/// `f(x, y) <= f(y, z)` agrees with the same comparison at weight `-n`,
/// exhaustively for n <= 6 and on sampled triples otherwise.
pub fn check_selection_equivalence(
    n: usize,
    extra_weights: &[i64],
    seed: u64,
) -> Result<LemmaReport> {
    if n < 2 {
        return Err(Error::LengthTooSmall(n));
    }
    if n > 62 {
        return Err(Error::InvalidArgument(format!(
            "selection check supports n <= 62, got {n}"
        )));
    }
    let n_i = n as i64;
    if let Some(&bad) = extra_weights.iter().find(|&&w| w >= -n_i) {
        return Err(Error::WeightNotBelowMinusN { weight: bad, n });
    }
    let reference = -n_i;
    let mut t = Tracker::new();
    let mut check = |x: u64, y: u64, z: u64| {
        let (x1, y1) = (x & 1 == 1, y & 1 == 1);
        let (oy, oz) = (y.count_ones(), z.count_ones());
        let base = f(reference, x1, oy) <= f(reference, y1, oz);
        for &w in extra_weights {
            let (lhs, rhs) = (f(w, x1, oy), f(w, y1, oz));
            if x1 != y1 {
                t.margin((lhs - rhs).abs() as f64, || {
                    format!(
                        "w={w}, x1={}, |y|={oy}, y1={}, |z|={oz}",
                        u8::from(x1),
                        u8::from(y1)
                    )
                });
            }
            t.record((lhs <= rhs) == base, || {
                format!("w={w}: x={x:0n$b}, y={y:0n$b}, z={z:0n$b} (bit 0 is position 1)")
            });
        }
    };
    let grid = if n <= SELECTION_EXHAUSTIVE_MAX_N {
        let full = 1u64 << n;
        for x in 0..full {
            for y in 0..full {
                for z in 0..full {
                    check(x, y, z);
                }
            }
        }
        format!("n={n}, all {} triples, w in {extra_weights:?}", full.pow(3))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = (1u64 << n) - 1;
        for _ in 0..SELECTION_SAMPLES {
            check(
                rng.random::<u64>() & mask,
                rng.random::<u64>() & mask,
                rng.random::<u64>() & mask,
            );
        }
        format!("n={n}, {SELECTION_SAMPLES} sampled triples, w in {extra_weights:?}")
    };
    Ok(t.report("selection-equivalence", grid))
}

/// Competition ranks (1 = best); tied values share the best rank.
fn ranks(values: &[i64]) -> Vec<usize> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|u| *u > v).count())
        .collect()
}

/// Samples population pairs of size `m` (stored first bits and current
/// bitstrings) and checks that fitness ranks coincide across all `weights`.
pub fn check_rank_equivalence(
    n: usize,
    m: usize,
    samples: u64,
    weights: &[i64],
    seed: u64,
) -> Result<LemmaReport> {
    if n < 2 {
        return Err(Error::LengthTooSmall(n));
    }
    if n > 64 {
        return Err(Error::InvalidArgument(format!(
            "rank check supports n <= 64, got {n}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidMu);
    }
    if let Some(&bad) = weights.iter().find(|&&w| w > -(n as i64)) {
        return Err(Error::WeightAboveMinusN { weight: bad, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut t = Tracker::new();
    let mut stored = vec![false; m];
    let mut ones = vec![0u32; m];
    let mut current = vec![0u64; m];
    for _ in 0..samples {
        for i in 0..m {
            stored[i] = rng.random();
            current[i] = rng.random::<u64>() & mask;
            ones[i] = current[i].count_ones();
        }
        let rank_vectors: Vec<Vec<usize>> = weights
            .iter()
            .map(|&w| {
                let v: Vec<i64> = (0..m).map(|i| f(w, stored[i], ones[i])).collect();
                ranks(&v)
            })
            .collect();
        for (wi, &w) in weights.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    if stored[i] != stored[j] {
                        let d = (f(w, stored[i], ones[i]) - f(w, stored[j], ones[j])).abs();
                        t.margin(d as f64, || {
                            format!(
                                "w={w}: (stored {}, |x|={}) vs (stored {}, |x|={})",
                                u8::from(stored[i]),
                                ones[i],
                                u8::from(stored[j]),
                                ones[j]
                            )
                        });
                    }
                }
            }
            if wi > 0 {
                let same = rank_vectors[wi] == rank_vectors[0];
                t.record(same, || {
                    let members: Vec<String> = (0..m)
                        .map(|i| format!("({}, {:0n$b})", u8::from(stored[i]), current[i]))
                        .collect();
                    format!(
                        "population [{}]: ranks {:?} at w={} but {:?} at w={w}",
                        members.join(", "),
                        rank_vectors[0],
                        weights[0],
                        rank_vectors[wi]
                    )
                });
            }
        }
        if weights.len() < 2 {
            t.record(true, String::new);
        }
    }
    Ok(t.report(
        "rank-equivalence",
        format!("n={n}, M={m}, {samples} sampled populations, w in {weights:?}"),
    ))
}
