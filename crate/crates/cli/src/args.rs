use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "shiftdisc",
    version,
    about = "Shift-graph colorings and k-set discrepancy experiments"
)]
pub struct Cli {
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Standard,
    Sqrt2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VariantArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

/// Which shift-graph coloring `κ` to build.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    /// Three colors when `l >= 3`, otherwise the delta-step fallback.
    Auto,
    /// The three-color pipeline; fails when N is too large for l.
    Three,
    /// Delta steps only (more colors, any l).
    Delta,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringKind {
    /// `γ'`: block colors summed mod c.
    Explicit,
    /// `γ = ψ∘φ`: window colors hashed to ±1.
    Randomized,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PipelineArgs {
    /// Universe size N of the ground set [N].
    #[arg(long = "n")]
    pub n: u64,
    /// Window length l (levels of κ).
    #[arg(long)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = PipelineKind::Auto)]
    pub pipeline: PipelineKind,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ColoringArgs {
    #[arg(long, value_enum, default_value_t = ColoringKind::Explicit)]
    pub coloring: ColoringKind,
    /// Modulus of `γ'`, odd and at least 3.
    #[arg(long, default_value_t = 3)]
    pub c: u64,
    /// Seed of the hash `ψ`.
    #[arg(long, default_value_t = 0)]
    pub psi_seed: u64,
}

/// Ground set `S`: an explicit list, `[m]`, or `[N]` by default.
#[derive(Args, Debug, Clone, Serialize)]
pub struct GroundArgs {
    /// Comma-separated elements of S.
    #[arg(long, conflicts_with = "m")]
    pub set: Option<String>,
    /// Use S = [m].
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Evaluate tw_h(x) or the sqrt2 tower.
    Towers(TowersArgs),
    /// Closed-form bound calculators.
    Bounds(BoundsArgs),
    /// Color one block with κ.
    ShiftColor(ShiftColorArgs),
    /// Check that κ is proper on Sh(N, l).
    ShiftVerify(ShiftVerifyArgs),
    /// Look for an odd cycle in Sh(N, l).
    OddCycle(OddCycleArgs),
    /// Sum of Bernoulli variables modulo l against the cosine bound.
    Parity(ParityArgs),
    /// Statistics of the number of properly hit intervals.
    CubeStats(CubeStatsArgs),
    /// Encode and decode every maximal cube image of a small instance.
    CodecRoundtrip(CodecArgs),
    /// Color one k-set.
    Color(ColorArgs),
    /// Exact discrepancy over all k-subsets of S.
    DiscExact(DiscExactArgs),
    /// Monte Carlo discrepancy over k-subsets of S.
    DiscMc(DiscMcArgs),
    /// Maximal-cube cover of C(S, k) and the composed deviation bound.
    CoverReport(CoverArgs),
    /// Largest deviation over ground sets of size m.
    WorstSet(WorstSetArgs),
}

impl Command {
    /// Subcommand name and its resolved configuration.
    pub fn describe(&self) -> (&'static str, serde_json::Value) {
        let name = match self {
            Command::Towers(_) => "towers",
            Command::Bounds(_) => "bounds",
            Command::ShiftColor(_) => "shift-color",
            Command::ShiftVerify(_) => "shift-verify",
            Command::OddCycle(_) => "odd-cycle",
            Command::Parity(_) => "parity",
            Command::CubeStats(_) => "cube-stats",
            Command::CodecRoundtrip(_) => "codec-roundtrip",
            Command::Color(_) => "color",
            Command::DiscExact(_) => "disc-exact",
            Command::DiscMc(_) => "disc-mc",
            Command::CoverReport(_) => "cover-report",
            Command::WorstSet(_) => "worst-set",
        };
        (name, serde_json::to_value(self).expect("plain config"))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TowersArgs {
    #[arg(long, value_enum, default_value_t = Kind::Standard)]
    pub kind: Kind,
    #[arg(long)]
    pub height: u32,
    #[arg(long)]
    pub x: u64,
    /// Largest bit length printed exactly.
    #[arg(long, default_value_t = 1 << 20)]
    pub bit_limit: u64,
    /// Also check sqrt2-tower_h(2x) >= 4 tw_h(x).
    #[arg(long)]
    pub domination: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    /// Bound names; all bounds whose parameters are given when omitted.
    #[arg(long = "name")]
    pub names: Vec<String>,
    #[arg(long = "n")]
    pub n: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShiftColorArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Comma-separated block of at most l elements.
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShiftVerifyArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Exhaustive: largest C(N, l+1) allowed. Sampled: number of edges drawn.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OddCycleArgs {
    #[arg(long = "n")]
    pub n: u64,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ParityArgs {
    /// Modulus.
    #[arg(long)]
    pub l: usize,
    /// Success probability as a decimal or a ratio such as 1/2.
    #[arg(long)]
    pub p: String,
    /// Number of variables.
    #[arg(long = "n")]
    pub n: usize,
    /// Residue; every residue is tabulated when omitted.
    #[arg(long)]
    pub h: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CubeStatsArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pub variant: VariantArg,
    #[arg(long)]
    pub l: usize,
    /// Number of intervals.
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CodecArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pub variant: VariantArg,
    #[arg(long)]
    pub l: usize,
    /// Number of intervals; S = [m] with m = n times the interval length.
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = PipelineKind::Auto)]
    pub pipeline: PipelineKind,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ColorArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub coloring: ColoringArgs,
    /// Comma-separated k-set.
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiscExactArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub coloring: ColoringArgs,
    #[command(flatten)]
    pub ground: GroundArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiscMcArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub coloring: ColoringArgs,
    #[command(flatten)]
    pub ground: GroundArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub coloring: ColoringArgs,
    #[command(flatten)]
    pub ground: GroundArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::B)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub dim_threshold: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WorstSetArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub coloring: ColoringArgs,
    /// Size of the scanned ground sets.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    /// Ground sets drawn in sampled mode.
    #[arg(long, default_value_t = 20)]
    pub set_samples: u64,
    /// Monte Carlo samples per ground set when C(m, k) exceeds the budget.
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Stream one JSON line per ground set before the final document.
    #[arg(long)]
    pub ndjson: bool,
}
