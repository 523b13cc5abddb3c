//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Generalised covariances and correlations of bivariate data.
#[derive(Debug, Parser)]
#[command(name = "gcor", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one scalar dependence measure.
    Compute(ComputeArgs),
    /// Compute a dependence surface on a level or threshold grid.
    Grid(GridArgs),
    /// Tail correlation curve and tail classification.
    Tail(TailArgs),
    /// Summary covariance and correlation over a region.
    Summary(SummaryArgs),
    /// Draw a sample from a copula.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input CSV with a header row.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Column for the first variable (default: first column).
    #[arg(long)]
    pub x: Option<String>,
    /// Column for the second variable (default: second column).
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComputeMeasure {
    /// Generalised correlation for the functionals given by --fx and --fy.
    Gcor,
    /// Mean correlation.
    Mcor,
    /// Expectile correlation at --tau and --eta.
    Ecor,
    /// Quantile correlation at --alpha and --beta.
    Qcor,
    /// Threshold correlation at the points --a and --b.
    Tcor,
    /// Quantile-mean correlation at --alpha.
    Qmcor,
    /// Blomqvist's beta.
    Blomqvist,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub measure: ComputeMeasure,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Threshold for the first variable.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Threshold for the second variable.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Functional of the first variable, e.g. `mean`, `quantile:0.25`, `expectile:0.9`, `threshold:1.5`.
    #[arg(long, default_value = "mean")]
    pub fx: String,
    /// Functional of the second variable.
    #[arg(long, default_value = "mean")]
    pub fy: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMode {
    /// Quantile-function domain (levels in (0, 1)).
    Qf,
    /// Distribution-function domain (thresholds in data units).
    Cdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Cov,
    Cor,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = GridMode::Qf)]
    pub mode: GridMode,
    #[arg(long, value_enum, default_value_t = Statistic::Cor)]
    pub statistic: Statistic,
    /// Comma-separated ascending levels for the QF grid (default 0.01, ..., 0.99).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Comma-separated thresholds for the first variable (CDF grid).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "thresholds_y")]
    pub thresholds_x: Option<Vec<f64>>,
    /// Comma-separated thresholds for the second variable (CDF grid).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "thresholds_x")]
    pub thresholds_y: Option<Vec<f64>>,
    /// Quantile trim for data-breakpoint CDF grids, as `LO,HI`.
    #[arg(long, value_parser = parse_pair, default_value = "0.025,0.975")]
    pub trim: (f64, f64),
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    pub format: GridFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub side: Side,
    /// Comma-separated levels (default 0.1 down to 0.001, or their complements).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Cdf,
    Qf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SummaryMeasure {
    /// Lebesgue measure on the whole domain.
    Lebesgue,
    /// Lebesgue measure on a rectangle given by --region or --trim.
    Region,
}

#[derive(Debug, Args)]
pub struct SummaryArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub domain: Domain,
    #[arg(long, value_enum, default_value_t = SummaryMeasure::Lebesgue)]
    pub measure: SummaryMeasure,
    /// Rectangle `X_LO,X_HI,Y_LO,Y_HI` in data units (cdf) or levels (qf).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "trim")]
    pub region: Option<Vec<f64>>,
    /// Quantile trim `LO,HI`: marginal quantiles (cdf) or levels (qf).
    #[arg(long, value_parser = parse_pair)]
    pub trim: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginalArg {
    Uniform,
    Normal,
    Exponential,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Copula, e.g. `independence`, `clayton:2`, `gaussian:0.5`, `t:0.3:4`,
    /// `cauchy:0.5`; a bare family name with --spearman.
    #[arg(long)]
    pub family: String,
    /// Calibrate the family parameter to this Spearman's rho.
    #[arg(long, allow_negative_numbers = true)]
    pub spearman: Option<f64>,
    #[arg(short, long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also emit columns x, y with this marginal applied.
    #[arg(long, value_enum)]
    pub marginal: Option<MarginalArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `LO,HI`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok((parse(a)?, parse(b)?))
}
