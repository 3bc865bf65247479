//! The OneMax_w problem: bitstrings, the time-linkage fitness and its optimum.
//!
//! The fitness of a decision `x^t` given the stored previous decision is
//! `|x^t| + w * x_1^{t-1}`. Only the first bit of the previous decision ever
//! enters the value, so states keep just that bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported |w|; every fitness then fits an `i64` with room to spare.
pub const MAX_ABS_WEIGHT: i64 = 1 << 31;

/// Fixed-length bitstring with a cached ones count. Position 0 is the first bit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString {
    bits: Vec<bool>,
    ones: usize,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 2 {
            return Err(Error::LengthTooSmall(bits.len()));
        }
        let ones = bits.iter().filter(|&&b| b).count();
        Ok(Self { bits, ones })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    pub fn all_ones(n: usize) -> Result<Self> {
        Self::new(vec![true; n])
    }

    /// Uniformly random bitstring of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::LengthTooSmall(n));
        }
        Self::new((0..n).map(|_| rng.random::<bool>()).collect())
    }

    /// Builds a bitstring from the low `n` bits of `mask` (bit i is position i).
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::EnumerationLimit { n, limit: 64 });
        }
        Self::new((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn zeros_count(&self) -> usize {
        self.bits.len() - self.ones
    }

    #[inline]
    pub fn first(&self) -> bool {
        self.bits[0]
    }

    /// Number of ones among positions 2..n (everything but the first bit).
    #[inline]
    pub fn rest_ones(&self) -> usize {
        self.ones - usize::from(self.bits[0])
    }

    #[inline]
    pub fn is_all_ones(&self) -> bool {
        self.ones == self.bits.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let b = &mut self.bits[i];
        *b = !*b;
        if *b {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitLiteral(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

/// Time-linkage weight `w` of the stored first bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Weight(i64);

impl Weight {
    pub fn new(w: i64) -> Result<Self> {
        if w.abs() > MAX_ABS_WEIGHT {
            return Err(Error::WeightOutOfRange(w));
        }
        Ok(Self(w))
    }

    #[inline]
    pub fn get(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Weight {
    type Error = Error;

    fn try_from(w: i64) -> Result<Self> {
        Self::new(w)
    }
}

impl From<Weight> for i64 {
    fn from(w: Weight) -> i64 {
        w.0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exact integer fitness value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fitness(pub i64);

impl Fitness {
    /// Fitness from a ones count and the stored first bit.
    #[inline]
    pub fn from_counts(w: Weight, prev_first: bool, ones: usize) -> Self {
        Fitness(ones as i64 + w.0 * i64::from(prev_first))
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Full state of a single-parent run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TLState {
    /// First bit of the stored previous decision.
    pub prev_first: bool,
    /// The current decision.
    pub current: BitString,
    /// Decision-time counter, starts at 1.
    pub t: u64,
    /// Offspring evaluations so far.
    pub g: u64,
}

impl TLState {
    pub fn new(prev_first: bool, current: BitString) -> Self {
        Self {
            prev_first,
            current,
            t: 1,
            g: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.current.len()
    }

    pub fn fitness(&self, w: Weight) -> Fitness {
        fitness(w, self.prev_first, &self.current)
    }
}

/// `|x| + w * prev_first`.
#[inline]
pub fn fitness(w: Weight, prev_first: bool, x: &BitString) -> Fitness {
    Fitness::from_counts(w, prev_first, x.ones())
}

/// Whether `(prev_first, current)` is a global optimum for the sign of `w`.
pub fn is_global_optimum(w: Weight, s: &TLState) -> bool {
    optimum_pair(w, s.prev_first, &s.current)
}

pub(crate) fn optimum_pair(w: Weight, prev_first: bool, current: &BitString) -> bool {
    current.is_all_ones() && prev_first_matches(w, prev_first)
}

/// The stored bit the optimum demands: 0 for w < 0, 1 for w > 0, anything for w = 0.
#[inline]
pub(crate) fn prev_first_matches(w: Weight, prev_first: bool) -> bool {
    match w.0.signum() {
        -1 => !prev_first,
        0 => true,
        _ => prev_first,
    }
}

/// Draws `X^0` and `X^1` uniformly and keeps the first bit of `X^0`.
pub fn random_init<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TLState> {
    if n < 2 {
        return Err(Error::LengthTooSmall(n));
    }
    let prev_first = rng.random::<bool>();
    let current = BitString::random(n, rng)?;
    Ok(TLState::new(prev_first, current))
}
