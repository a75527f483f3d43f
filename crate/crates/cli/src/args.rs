use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bandmap",
    version,
    about = "Band spectra of tridiagonal operators built from map orbits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limit cycles over a parameter range, with detected period doublings
    Bifurcate(BifurcateArgs),
    /// Limit cycle at one parameter value
    Cycle(CycleArgs),
    /// Density of states on a grid
    Density(GridCommandArgs),
    /// Band edges, tail coefficients and point masses
    Bands(PointArgs),
    /// Orthogonal polynomials on a grid and their Gram matrix
    Ortho(OrthoArgs),
    /// Run the invariant suite and print a pass/fail table
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Map family
    #[arg(long, default_value = "logistic")]
    pub family: String,
    #[arg(long, default_value_t = 0.3)]
    pub seed: f64,
    /// Initial burn-in before cycle detection; raised by ten until the period is confirmed
    #[arg(long, default_value_t = 10_000)]
    pub burn_in: usize,
    /// Cycle closure tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Data file; the JSON sidecar goes next to it. Without it data goes to
    /// stdout and the summary to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub lambda_min: f64,
    #[arg(long)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 801)]
    pub lambda_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CycleArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub lambda: f64,
    /// Chain depth M before the periodic tail takes over
    #[arg(long, default_value_t = bandmap_core::DEFAULT_DEPTH)]
    pub depth: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, requires = "grid_max", allow_negative_numbers = true)]
    pub grid_min: Option<f64>,
    #[arg(long, requires = "grid_min", allow_negative_numbers = true)]
    pub grid_max: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub grid_points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GridCommandArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OrthoArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Highest polynomial degree
    #[arg(long, default_value_t = 7)]
    pub nmax: usize,
}
