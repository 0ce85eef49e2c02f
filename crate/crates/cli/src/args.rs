use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partial_copula::Family;

#[derive(Debug, Parser)]
#[command(name = "pcopula", version, about = "Partial and conditional copulas of trivariate models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suite; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Dependence measures of the partial copula and expected conditional measures.
    Measure(MeasureArgs),
    /// Evaluate the partial copula on a grid of the unit square.
    Partial(PartialArgs),
    /// Normal-score density grids and the conditional Kendall curve.
    Grid(GridArgs),
    /// Draw from a trivariate family and append the CPITs.
    Sample(SampleArgs),
    /// Joint versus stepwise likelihood experiment.
    Estimate(EstimateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Trivariate family: fgm3, frank3, gauss3, clayton3, polyce.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Family parameter; repeat for multi-parameter families.
    #[arg(long = "theta", allow_negative_numbers = true)]
    pub theta: Vec<f64>,
    /// Gauss-Legendre order for every quadrature.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=512))]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=512))]
    pub order: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample size of the simulated checks.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1000..))]
    pub n: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PartialArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid points per axis, endpoints included.
    #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u32).range(2..=4096))]
    pub resolution: u32,
    /// Average the conditional copula by quadrature even when a closed form exists.
    #[arg(long)]
    pub quadrature: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Conditioning values of the density slices.
    #[arg(long = "z", default_values_t = [0.5])]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(16..=4096))]
    pub resolution: u32,
    /// Half-width of the normal-score square.
    #[arg(long, default_value_t = 3.0)]
    pub range: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Simplified,
    Nonsimplified,
    Symmetric,
    /// Simplified and non-simplified.
    Both,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = ScenarioArg::Both)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1000..))]
    pub n: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}
