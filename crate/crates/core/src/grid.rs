//! Distributional covariances and correlations over grids: QF surfaces on
//! quantile levels, CDF surfaces on thresholds, and global dependence
//! classification.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::check_level;
use crate::local::LocalCounts;
use crate::sample::{BivariateSample, EmpiricalDistribution, JointCountGrid};

/// Which quantity a surface holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceMeasure {
    #[serde(rename = "CDFCov")]
    CdfCov,
    #[serde(rename = "CDFCor")]
    CdfCor,
    #[serde(rename = "QFCov")]
    QfCov,
    #[serde(rename = "QFCor")]
    QfCor,
}

impl SurfaceMeasure {
    pub fn is_correlation(self) -> bool {
        matches!(self, Self::CdfCor | Self::QfCor)
    }

    pub fn is_quantile(self) -> bool {
        matches!(self, Self::QfCov | Self::QfCor)
    }

    fn name(self) -> &'static str {
        match self {
            Self::CdfCov => "CDFCov",
            Self::CdfCor => "CDFCor",
            Self::QfCov => "QFCov",
            Self::QfCor => "QFCor",
        }
    }
}

impl fmt::Display for SurfaceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cdfcov" => Ok(Self::CdfCov),
            "cdfcor" => Ok(Self::CdfCor),
            "qfcov" => Ok(Self::QfCov),
            "qfcor" => Ok(Self::QfCor),
            _ => Err(Error::InvalidParam(format!("unknown surface measure `{s}`"))),
        }
    }
}

/// How grid coordinates are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    Quantile { levels: Vec<f64> },
    Threshold { xs: Vec<f64>, ys: Vec<f64> },
    DataBreakpoints { trim: (f64, f64) },
}

pub const DEFAULT_TRIM: (f64, f64) = (0.025, 0.975);

/// Levels `0.01, 0.02, …, 0.99`.
pub fn default_levels() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

fn check_ascending(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{what} contains a non-finite value")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("{what} must be strictly ascending")));
    }
    Ok(())
}

impl GridSpec {
    pub fn quantile(levels: Vec<f64>) -> Result<Self> {
        let spec = Self::Quantile { levels };
        spec.validate()?;
        Ok(spec)
    }

    pub fn threshold(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let spec = Self::Threshold { xs, ys };
        spec.validate()?;
        Ok(spec)
    }

    pub fn data_breakpoints(lo: f64, hi: f64) -> Result<Self> {
        let spec = Self::DataBreakpoints { trim: (lo, hi) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Quantile { levels } => {
                check_ascending(levels, "levels")?;
                levels.iter().try_for_each(|&l| check_level(l))
            }
            Self::Threshold { xs, ys } => {
                check_ascending(xs, "x grid")?;
                check_ascending(ys, "y grid")
            }
            Self::DataBreakpoints { trim: (lo, hi) } => {
                if !(0.0 <= *lo && lo < hi && *hi <= 1.0) {
                    return Err(Error::InvalidGrid(format!("trim ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1")));
                }
                Ok(())
            }
        }
    }
}

/// Distinct values of a margin inside `[q̂_lo, q̂_hi]` and strictly below the
/// maximum, where threshold measures are not identically zero.
pub fn trimmed_breakpoints(margin: &EmpiricalDistribution, lo: f64, hi: f64) -> Vec<f64> {
    let q_lo = margin.quantile(lo);
    let q_hi = margin.quantile(hi);
    let max = margin.max();
    margin.distinct().into_iter().filter(|&v| v >= q_lo && v <= q_hi && v < max).collect()
}

/// Matrix of local measures indexed by `(axis_x[i], axis_y[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceSurface {
    pub measure: SurfaceMeasure,
    pub axis_x: Vec<f64>,
    pub axis_y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub degenerate: Vec<Vec<bool>>,
}

fn from_counts(
    measure: SurfaceMeasure,
    axis_x: Vec<f64>,
    axis_y: Vec<f64>,
    counts: impl Fn(usize, usize) -> LocalCounts + Sync,
) -> DependenceSurface {
    let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..axis_x.len())
        .into_par_iter()
        .map(|i| {
            (0..axis_y.len())
                .map(|j| {
                    let c = counts(i, j);
                    let r = c.result();
                    let value = if measure.is_correlation() { r.correlation } else { r.covariance };
                    (value, r.degenerate)
                })
                .unzip()
        })
        .collect();
    let (values, degenerate) = rows.into_iter().unzip();
    DependenceSurface { measure, axis_x, axis_y, values, degenerate }
}

/// QF covariance (`correlation = false`) or correlation surface on a level grid.
pub fn qf_surface(sample: &BivariateSample, levels: &[f64], correlation: bool) -> Result<DependenceSurface> {
    GridSpec::Quantile { levels: levels.to_vec() }.validate()?;
    let mx = sample.margin_x();
    let my = sample.margin_y();
    let qx: Vec<f64> = levels.iter().map(|&a| mx.quantile(a)).collect();
    let qy: Vec<f64> = levels.iter().map(|&b| my.quantile(b)).collect();
    let cx: Vec<u64> = qx.iter().map(|&q| mx.count_le(q) as u64).collect();
    let cy: Vec<u64> = qy.iter().map(|&q| my.count_le(q) as u64).collect();
    let joint = JointCountGrid::new(sample, &qx, &qy);
    let n = sample.len() as u64;
    let measure = if correlation { SurfaceMeasure::QfCor } else { SurfaceMeasure::QfCov };
    Ok(from_counts(measure, levels.to_vec(), levels.to_vec(), |i, j| LocalCounts { n, joint: joint.count(i, j), x: cx[i], y: cy[j] }))
}

/// CDF covariance or correlation surface on threshold grids.
pub fn cdf_surface(sample: &BivariateSample, xs: &[f64], ys: &[f64], correlation: bool) -> Result<DependenceSurface> {
    GridSpec::Threshold { xs: xs.to_vec(), ys: ys.to_vec() }.validate()?;
    let mx = sample.margin_x();
    let my = sample.margin_y();
    let cx: Vec<u64> = xs.iter().map(|&a| mx.count_le(a) as u64).collect();
    let cy: Vec<u64> = ys.iter().map(|&b| my.count_le(b) as u64).collect();
    let joint = JointCountGrid::new(sample, xs, ys);
    let n = sample.len() as u64;
    let measure = if correlation { SurfaceMeasure::CdfCor } else { SurfaceMeasure::CdfCov };
    Ok(from_counts(measure, xs.to_vec(), ys.to_vec(), |i, j| LocalCounts { n, joint: joint.count(i, j), x: cx[i], y: cy[j] }))
}

/// CDF surface on the trimmed distinct data values of each margin.
pub fn cdf_surface_breakpoints(sample: &BivariateSample, trim: (f64, f64), correlation: bool) -> Result<DependenceSurface> {
    GridSpec::DataBreakpoints { trim }.validate()?;
    let xs = trimmed_breakpoints(&sample.margin_x(), trim.0, trim.1);
    let ys = trimmed_breakpoints(&sample.margin_y(), trim.0, trim.1);
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyGrid);
    }
    cdf_surface(sample, &xs, &ys, correlation)
}

/// Evaluate any [`GridSpec`]; quantile specs give QF surfaces, the others CDF surfaces.
pub fn surface(sample: &BivariateSample, spec: &GridSpec, correlation: bool) -> Result<DependenceSurface> {
    match spec {
        GridSpec::Quantile { levels } => qf_surface(sample, levels, correlation),
        GridSpec::Threshold { xs, ys } => cdf_surface(sample, xs, ys, correlation),
        GridSpec::DataBreakpoints { trim } => cdf_surface_breakpoints(sample, *trim, correlation),
    }
}

/// Sign pattern of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalDependence {
    Positive,
    Negative,
    Mixed,
}

impl fmt::Display for GlobalDependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Mixed => "mixed",
        })
    }
}

/// Noise scale `2/√n` used as the default classification tolerance.
pub fn default_tolerance(n: usize) -> f64 {
    2.0 / (n as f64).sqrt()
}

/// Positive if every cell is `>= -tol`, negative if every cell is `<= tol`,
/// otherwise mixed.
pub fn global_dependence_classify(surface: &DependenceSurface, tol: f64) -> GlobalDependence {
    let cells = || surface.values.iter().flatten();
    if cells().all(|&v| v >= -tol) {
        GlobalDependence::Positive
    } else if cells().all(|&v| v <= tol) {
        GlobalDependence::Negative
    } else {
        GlobalDependence::Mixed
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::InvalidGrid(format!("line {line}: `{field}` is not a number")))
}

impl DependenceSurface {
    pub fn shape(&self) -> (usize, usize) {
        (self.axis_x.len(), self.axis_y.len())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Long-format CSV `axis_x,axis_y,value,degenerate`, row-major, numbers
    /// with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis_x,axis_y,value,degenerate\n");
        for (i, &a) in self.axis_x.iter().enumerate() {
            for (j, &b) in self.axis_y.iter().enumerate() {
                out.push_str(&format!("{a:.16e},{b:.16e},{:.16e},{}\n", self.values[i][j], self.degenerate[i][j]));
            }
        }
        out
    }

    /// Inverse of [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str, measure: SurfaceMeasure) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "axis_x,axis_y,value,degenerate" => {}
            _ => return Err(Error::InvalidGrid("missing surface CSV header".into())),
        }
        let mut cells = Vec::new();
        for (idx, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::InvalidGrid(format!("line {}: expected 4 fields", idx + 1)));
            }
            let flag = match fields[3].trim() {
                "true" => true,
                "false" => false,
                other => return Err(Error::InvalidGrid(format!("line {}: bad flag `{other}`", idx + 1))),
            };
            cells.push((parse_number(fields[0], idx + 1)?, parse_number(fields[1], idx + 1)?, parse_number(fields[2], idx + 1)?, flag));
        }
        if cells.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let ny = cells.iter().take_while(|c| c.0 == cells[0].0).count();
        if cells.len() % ny != 0 {
            return Err(Error::InvalidGrid("cell count is not a full rectangle".into()));
        }
        let axis_y: Vec<f64> = cells[..ny].iter().map(|c| c.1).collect();
        let axis_x: Vec<f64> = cells.iter().step_by(ny).map(|c| c.0).collect();
        let mut values = Vec::with_capacity(axis_x.len());
        let mut degenerate = Vec::with_capacity(axis_x.len());
        for (i, row) in cells.chunks(ny).enumerate() {
            if row.iter().zip(&axis_y).any(|(c, &b)| c.0 != axis_x[i] || c.1 != b) {
                return Err(Error::InvalidGrid(format!("row {i} does not match the axes")));
            }
            values.push(row.iter().map(|c| c.2).collect());
            degenerate.push(row.iter().map(|c| c.3).collect());
        }
        Ok(Self { measure, axis_x, axis_y, values, degenerate })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("surface serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidGrid(e.to_string()))
    }
}
