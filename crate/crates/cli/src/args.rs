use clap::{Args, Parser, Subcommand, ValueEnum};

use tlom_core::{AlgorithmKind, SingleParent};

#[derive(Debug, Parser)]
#[command(
    name = "tlom",
    version,
    about = "Experiments on the time-linkage OneMax_w benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate of the success and stagnation probabilities.
    Estimate(EstimateArgs),
    /// Exact absorption probabilities from the lumped Markov chain.
    Exact(ExactArgs),
    /// Check the mutation, selection and rank properties on a grid.
    Verify(VerifyArgs),
    /// Mean successful runtime for a list of problem sizes.
    Scaling(ScalingArgs),
    /// Replay one seeded single-parent trial generation by generation.
    Trace(TraceArgs),
    /// Run a preset experiment and print a pass/fail verdict.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Rls,
    Ea,
    MuEa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    Facts,
    Selection,
    Ranks,
    All,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Population size, required with `--algo mu-ea`.
    #[arg(long)]
    pub mu: Option<usize>,
}

impl AlgoArgs {
    pub fn kind(&self) -> Result<AlgorithmKind, String> {
        match (self.algo, self.mu) {
            (Algo::MuEa, Some(mu)) => Ok(AlgorithmKind::MuPlusOneEa { mu }),
            (Algo::MuEa, None) => Err("--algo mu-ea requires --mu".into()),
            (_, Some(_)) => Err("--mu is only valid with --algo mu-ea".into()),
            (Algo::Rls, None) => Ok(AlgorithmKind::Rls),
            (Algo::Ea, None) => Ok(AlgorithmKind::OnePlusOneEa),
        }
    }

    pub fn single_parent(&self, command: &str) -> Result<SingleParent, String> {
        self.kind()?
            .single_parent()
            .ok_or_else(|| format!("{command} supports only --algo rls and --algo ea"))
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub w: i64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Offspring evaluations per trial [default: ceil(100 n ln n)].
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads, 0 for one per CPU.
    #[arg(long, env = "TLOM_WORKERS", default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub w: i64,
    /// Include all 4n lumped states.
    #[arg(long)]
    pub per_state: bool,
    /// Include expected generations to the optimum, conditioned on reaching it.
    #[arg(long)]
    pub hitting_times: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Lemma::All)]
    pub lemma: Lemma,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Weights for the selection and rank checks [default: -n-1, -2n, -10n].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Vec<i64>,
    /// Population size of the rank check.
    #[arg(long, default_value_t = 5)]
    pub members: usize,
    /// Random populations drawn by the rank check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub w: i64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, env = "TLOM_WORKERS", default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub w: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Preset to run: 4 (w <= -n), 5 (-n <= w < 0), 7 (RLS, w >= 2),
    /// 8 (w in {0, 1}), 9 (n ln n runtime shape), 10 ((mu+1) EA, w <= -n).
    #[arg(long, value_parser = ["4", "5", "7", "8", "9", "10"])]
    pub theorem: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long, env = "TLOM_WORKERS", default_value_t = 0)]
    pub workers: usize,
}
