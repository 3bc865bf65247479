//! Time-linkage RLS, (1+1) EA and (mu+1) EA.
//!
//! An offspring is always evaluated with its parent's first bit as the stored
//! history, and a single-parent run accepts it when that value is at least the
//! incumbent's own time-linkage fitness.

mod mutation;
mod population;
mod single;
mod trial;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mutation::{mutate_ea, mutate_rls};
pub use population::{step_mu_plus_one, PopulationMember};
pub use single::{accept, step};
pub use trial::{
    mu_plus_one_snapshots, run_trial, run_trial_traced, FinalState, TraceRecord, TrialOutcome,
    TrialResult,
};

pub(crate) use mutation::MutationOp;

/// Which algorithm drives a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Rls,
    #[serde(rename = "ea")]
    OnePlusOneEa,
    #[serde(rename = "mu-ea")]
    MuPlusOneEa {
        mu: usize,
    },
}

impl AlgorithmKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            AlgorithmKind::MuPlusOneEa { mu: 0 } => Err(Error::InvalidMu),
            k => Ok(k),
        }
    }

    /// Short identifier used in CSV output.
    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::Rls => "rls",
            AlgorithmKind::OnePlusOneEa => "ea",
            AlgorithmKind::MuPlusOneEa { .. } => "mu-ea",
        }
    }

    pub fn single_parent(self) -> Option<SingleParent> {
        SingleParent::try_from(self).ok()
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmKind::MuPlusOneEa { mu } => write!(f, "mu-ea(mu={mu})"),
            k => f.write_str(k.id()),
        }
    }
}

/// The two single-parent algorithms, the only ones with a per-state analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleParent {
    Rls,
    #[serde(rename = "ea")]
    OnePlusOneEa,
}

impl SingleParent {
    pub const ALL: [SingleParent; 2] = [SingleParent::Rls, SingleParent::OnePlusOneEa];

    pub fn id(self) -> &'static str {
        AlgorithmKind::from(self).id()
    }

    pub(crate) fn mutation(self) -> MutationOp {
        match self {
            SingleParent::Rls => MutationOp::OneBit,
            SingleParent::OnePlusOneEa => MutationOp::Standard,
        }
    }
}

impl fmt::Display for SingleParent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl From<SingleParent> for AlgorithmKind {
    fn from(k: SingleParent) -> Self {
        match k {
            SingleParent::Rls => AlgorithmKind::Rls,
            SingleParent::OnePlusOneEa => AlgorithmKind::OnePlusOneEa,
        }
    }
}

impl TryFrom<AlgorithmKind> for SingleParent {
    type Error = Error;

    fn try_from(k: AlgorithmKind) -> Result<Self> {
        match k {
            AlgorithmKind::Rls => Ok(SingleParent::Rls),
            AlgorithmKind::OnePlusOneEa => Ok(SingleParent::OnePlusOneEa),
            other => Err(Error::NotSingleParent(other.to_string())),
        }
    }
}

impl FromStr for SingleParent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rls" => Ok(SingleParent::Rls),
            "ea" => Ok(SingleParent::OnePlusOneEa),
            other => Err(Error::InvalidArgument(format!(
                "unknown single-parent algorithm {other:?}"
            ))),
        }
    }
}
