use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "coverbound",
    version,
    about = "Spectral bounds for unraveled balls of weighted graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for per-vertex work (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Eigensolver residual tolerance, relative to the operator norm bound.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Maximum number of nodes in one unraveled ball.
    #[arg(long, global = true, default_value_t = coverbound::cover::DEFAULT_NODE_BUDGET)]
    pub budget: usize,

    /// Cross-check against the brute-force oracles.
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a graph and summarize it.
    Validate(GraphArg),
    /// Generate a graph in the edge-list format.
    Gen(GenArgs),
    /// Build an unraveled ball and compute its spectral radius.
    Unravel(UnravelArgs),
    /// Build a non-backtracking chain and its stationary distribution.
    Chain(ChainArgs),
    /// Evaluate a bound and compare it with the unraveled balls.
    Bound(BoundArgs),
    /// Build and verify a certificate.
    Certify(CertifyArgs),
    /// Print the curve constants.
    Constants,
    /// Print y, g(y), ell_t0(y) as CSV on a grid of step 1/512.
    PlotG(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Cycle,
    Path,
    Complete,
    Petersen,
    RandomRegular,
    WeightedRegular,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weight range `lo,hi` for weighted-regular graphs.
    #[arg(long, default_value = "0.5,2")]
    pub weights: String,
    #[arg(long, default_value_t = coverbound::generators::DEFAULT_BALANCE_TOL)]
    pub balance_tol: f64,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UnravelArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Center vertex label.
    #[arg(long)]
    pub vertex: String,
    #[arg(long)]
    pub r: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainArg {
    Uniform,
    Weighted,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ChainArg::Uniform)]
    pub chain: ChainArg,
    /// Monte-Carlo steps for `--oracle`.
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKindArg {
    General,
    Strong,
    Simple,
    Weak,
    AlonBoppana,
    UniversalCover,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub kind: BoundKindArg,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_enum, default_value_t = ChainArg::Uniform)]
    pub chain: ChainArg,
    /// `one`, `inv-sqrt-complement` or `table:<file>`.
    #[arg(long, default_value = "one")]
    pub g: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertKindArg {
    Theorem,
    Case1,
    Lemma42,
    Lambda2,
    Ratio,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub kind: CertKindArg,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_enum, default_value_t = ChainArg::Uniform)]
    pub chain: ChainArg,
    /// `one`, `inv-sqrt-complement` or `table:<file>`.
    #[arg(long, default_value = "one")]
    pub g: String,
    /// Vertex label (lemma42; all vertices when absent).
    #[arg(long)]
    pub vertex: Option<String>,
    /// Directed edge `u,v` by labels (case1; heaviest edge when absent).
    #[arg(long)]
    pub edge: Option<String>,
    /// Sampled walks (ratio).
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the full vector in the certificate.
    #[arg(long)]
    pub full_vector: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
}
