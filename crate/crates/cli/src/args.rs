use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use momentmono_core::{Family, OrderPair};

#[derive(Debug, Parser)]
#[command(
    name = "momentmono",
    version,
    about = "Moments, moment ratios and ratio-based fits for Weibull, Gamma and Log-normal data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raw and root moments for i = 1..max-order.
    Moments(MomentsArgs),
    /// Fit a family to a sample file by moment-ratio inversion.
    Fit(FitArgs),
    /// Draw a seeded sample and write it one value per line.
    Sample(SampleArgs),
    /// Run the numerical verification sweep; exits 5 on any violation.
    Verify(VerifyArgs),
    /// Density curves on a grid, one column per parameter set.
    PdfData(PdfDataArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Fit(_) => "fit",
            Command::Sample(_) => "sample",
            Command::Verify(_) => "verify",
            Command::PdfData(_) => "pdf-data",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Distribution parameters. `pdf-data` accepts comma-separated lists; the
/// other commands take exactly one value per flag.
#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub k: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 6)]
    pub max_order: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub family: Family,
    /// Moment orders as `n,m` with n > m > 0.
    #[arg(long, default_value = "2,1")]
    pub orders: OrderPair,
    /// Sample file: one number per line, `#` comments allowed.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Initial bisection bracket as `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub bracket: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample file to write; stdout when omitted. With a path, a short
    /// summary report goes to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Shape values per family in the sweep grids.
    #[arg(long)]
    pub points: Option<usize>,
    /// Slack on the ordering checks: ln R >= -tolerance. A negative value
    /// demands a strictly positive gap.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PdfDataArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
