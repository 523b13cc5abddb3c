//! Subcommand drivers.

use std::io::Write;
use std::path::Path;

use gcor_core::copula::Marginal;
use gcor_core::grid::DEFAULT_TRIM;
use gcor_core::local::LocalEstimator;
use gcor_core::tail::default_tail_levels;
use gcor_core::{
    blomqvist_beta, calibrate_spearman, default_levels, ecor, gcor, mcor, qcor, qmcor, regional_scor, sample_copula, scor, surface,
    tail_curve, tail_estimate, tcor, BivariateSample, CopulaFamily, CopulaSpec, CouplingBounds, FunctionalSpec, GridSpec, MeasureResult,
    MeasureSpec, Region, RngSeed, SummaryDomain, TailSide,
};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::input::{read_sample, Columns};
use crate::svg;

/// One scalar measure with its normalisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub measure: String,
    pub params: String,
    pub covariance: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub correlation: f64,
    pub n: usize,
    pub degenerate: bool,
}

impl Report {
    fn new(measure: impl Into<String>, params: impl Into<String>, r: MeasureResult, n: usize) -> Self {
        Self {
            measure: measure.into(),
            params: params.into(),
            covariance: r.covariance,
            lower_bound: r.bounds.lower,
            upper_bound: r.bounds.upper,
            correlation: r.correlation,
            n,
            degenerate: r.degenerate,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "measure,params,covariance,lower_bound,upper_bound,correlation,n,degenerate\n{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            self.measure,
            csv_field(&self.params),
            self.covariance,
            self.lower_bound,
            self.upper_bound,
            self.correlation,
            self.n,
            self.degenerate
        )
    }

    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => json(self),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn load(input: &InputArgs) -> CliResult<BivariateSample> {
    read_sample(&input.input, &Columns { x: input.x.clone(), y: input.y.clone() })
}

fn emit(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.output {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse_functional(s: &str) -> CliResult<FunctionalSpec> {
    Ok(s.parse()?)
}

fn required(value: Option<f64>, flag: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Parse(format!("--measure tcor needs {flag}")))
}

pub fn compute(args: &ComputeArgs) -> CliResult<Report> {
    let s = load(&args.input)?;
    let n = s.len();
    let report = match args.measure {
        ComputeMeasure::Gcor => {
            let (fx, fy) = (parse_functional(&args.fx)?, parse_functional(&args.fy)?);
            Report::new("gcor", format!("fx={fx};fy={fy}"), gcor(&s, &fx, &fy)?, n)
        }
        ComputeMeasure::Mcor => Report::new("mcor", "", mcor(&s)?, n),
        ComputeMeasure::Ecor => Report::new("ecor", format!("tau={};eta={}", args.tau, args.eta), ecor(&s, args.tau, args.eta)?, n),
        ComputeMeasure::Qcor => {
            Report::new("qcor", format!("alpha={};beta={}", args.alpha, args.beta), qcor(&s, args.alpha, args.beta)?, n)
        }
        ComputeMeasure::Tcor => {
            let (a, b) = (required(args.a, "--a")?, required(args.b, "--b")?);
            Report::new("tcor", format!("a={a};b={b}"), tcor(&s, a, b), n)
        }
        ComputeMeasure::Qmcor => Report::new("qmcor", format!("alpha={}", args.alpha), qmcor(&s, args.alpha)?, n),
        ComputeMeasure::Blomqvist => {
            // covariance is F̂(med, med) - 1/4, normalised by its range ±1/4
            let degenerate = LocalEstimator::new(&s).quantile_counts(0.5, 0.5)?.is_degenerate();
            let beta = blomqvist_beta(&s);
            let bounds = CouplingBounds { lower: -0.25, upper: 0.25 };
            Report::new("blomqvist", "", MeasureResult::normalise(beta / 4.0, bounds, degenerate), n)
        }
    };
    Ok(report)
}

pub fn grid(args: &GridArgs) -> CliResult<gcor_core::DependenceSurface> {
    let s = load(&args.input)?;
    let spec = match args.mode {
        GridMode::Qf => GridSpec::quantile(args.levels.clone().unwrap_or_else(default_levels))?,
        GridMode::Cdf => match (&args.thresholds_x, &args.thresholds_y) {
            (Some(xs), Some(ys)) => GridSpec::threshold(xs.clone(), ys.clone())?,
            _ => GridSpec::data_breakpoints(args.trim.0, args.trim.1)?,
        },
    };
    Ok(surface(&s, &spec, args.statistic == Statistic::Cor)?)
}

/// Tail curve plus its classification, if the occupancy rule allows one.
#[derive(Debug, Serialize)]
pub struct TailReport {
    pub curve: gcor_core::TailCurve,
    pub classification: Option<gcor_core::TailClassification>,
}

pub fn tail(args: &TailArgs) -> CliResult<TailReport> {
    let s = load(&args.input)?;
    let side = match args.side {
        Side::Lower => TailSide::Lower,
        Side::Upper => TailSide::Upper,
    };
    let levels = args.levels.clone().unwrap_or_else(|| default_tail_levels(side));
    let curve = tail_curve(&s, side, &levels)?;
    let classification = match tail_estimate(&curve) {
        Ok(c) => Some(c),
        Err(gcor_core::Error::InsufficientTailData { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(TailReport { curve, classification })
}

pub fn summary(args: &SummaryArgs) -> CliResult<Report> {
    let s = load(&args.input)?;
    let domain = match args.domain {
        Domain::Cdf => SummaryDomain::Cdf,
        Domain::Qf => SummaryDomain::Qf,
    };
    let region = match (args.measure, &args.region, args.trim) {
        (SummaryMeasure::Lebesgue, None, None) => None,
        (_, Some(r), _) if r.len() == 4 => Some(Region::new((r[0], r[1]), (r[2], r[3]))),
        (_, Some(r), _) => return Err(CliError::Parse(format!("--region needs 4 numbers, got {}", r.len()))),
        (_, None, trim) => Some(trim_region(&s, domain, trim.unwrap_or(DEFAULT_TRIM))),
    };
    let (result, params) = match region {
        None => (scor(&s, domain, &MeasureSpec::Lebesgue)?, "lebesgue".to_string()),
        Some(r) => (regional_scor(&s, domain, r)?, format!("region=[{},{}]x[{},{}]", r.x.0, r.x.1, r.y.0, r.y.1)),
    };
    Ok(Report::new(format!("scor_{domain}"), params, result, s.len()))
}

/// Trimmed region: marginal quantiles in the CDF domain, levels in the QF domain.
fn trim_region(s: &BivariateSample, domain: SummaryDomain, (lo, hi): (f64, f64)) -> Region {
    match domain {
        SummaryDomain::Cdf => {
            let (mx, my) = (s.margin_x(), s.margin_y());
            Region::new((mx.quantile(lo), mx.quantile(hi)), (my.quantile(lo), my.quantile(hi)))
        }
        SummaryDomain::Qf => Region::square(lo, hi),
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<String> {
    let spec: CopulaSpec = match args.spearman {
        Some(target) => calibrate_spearman(args.family.parse::<CopulaFamily>()?, target)?,
        None => args.family.parse()?,
    };
    let s = sample_copula(&spec, args.n, RngSeed(args.seed))?;
    let marginal = args.marginal.map(|m| match m {
        MarginalArg::Uniform => Marginal::Uniform,
        MarginalArg::Normal => Marginal::Normal,
        MarginalArg::Exponential => Marginal::Exponential,
    });
    let mut out = String::from(if marginal.is_some() { "u,v,x,y\n" } else { "u,v\n" });
    for (u, v) in s.pairs() {
        match marginal {
            Some(m) => out.push_str(&format!("{u:.16e},{v:.16e},{:.16e},{:.16e}\n", m.transform(u), m.transform(v))),
            None => out.push_str(&format!("{u:.16e},{v:.16e}\n")),
        }
    }
    Ok(out)
}

/// Runs a parsed command line, writing its artifact.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Compute(a) => emit(&a.output, &compute(a)?.render(a.format)),
        Command::Grid(a) => {
            let surface = grid(a)?;
            let text = match a.format {
                GridFormat::Csv => surface.to_csv(),
                GridFormat::Json => surface.to_json() + "\n",
                GridFormat::Svg => svg::render(&surface),
            };
            emit(&a.output, &text)
        }
        Command::Tail(a) => {
            let report = tail(a)?;
            let text = match a.format {
                ReportFormat::Csv => report.curve.to_csv(),
                ReportFormat::Json => json(&report),
            };
            emit(&a.output, &text)
        }
        Command::Summary(a) => emit(&a.output, &summary(a)?.render(a.format)),
        Command::Simulate(a) => emit(&a.output, &simulate(a)?),
    }
}
