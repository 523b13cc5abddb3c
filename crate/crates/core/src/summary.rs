//! Summary covariances and correlations: integrals of CDF or QF
//! covariance surfaces over the plane, the unit square, or a rectangle.
//!
//! Both surfaces are step functions of the data, so the integrals are
//! evaluated exactly. Over a rectangle `[lo_x, hi_x] × [lo_y, hi_y]` the
//! CDF integral is the covariance of
//! `L_x(i) = |[x_i, ∞) ∩ [lo_x, hi_x] ∩ [min x, max x]|` and its `y`
//! counterpart; the QF integral is the covariance of
//! `W_x(i) = |(#{x_j < x_i}/n, 1] ∩ [lo_x, hi_x]|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcov::{CouplingBounds, MeasureResult};
use crate::numeric::{exact_mean, exact_sum};
use crate::sample::{BivariateSample, EmpiricalDistribution};

/// Summary correlations share the generalised correlation's result type.
pub type SummaryResult = MeasureResult;

/// Which distributional covariance is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryDomain {
    /// CDF covariance over the observation plane.
    Cdf,
    /// QF covariance over the unit square of levels.
    Qf,
}

impl fmt::Display for SummaryDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cdf => "cdf",
            Self::Qf => "qf",
        })
    }
}

impl FromStr for SummaryDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cdf" => Ok(Self::Cdf),
            "qf" => Ok(Self::Qf),
            _ => Err(Error::InvalidParam(format!("unknown summary domain `{s}`"))),
        }
    }
}

/// Closed rectangle `[x.0, x.1] × [y.0, y.1]`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { x, y }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { x: (lo, hi), y: (lo, hi) }
    }

    pub fn plane() -> Self {
        Self::square(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn unit_square() -> Self {
        Self::square(0.0, 1.0)
    }
}

/// Integrating measure: Lebesgue on the whole domain or on a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeasureSpec {
    Lebesgue,
    LebesgueOnRegion(Region),
}

impl MeasureSpec {
    /// Rectangle of integration within `domain`, validated.
    pub fn region(&self, domain: SummaryDomain) -> Result<Region> {
        let region = match (self, domain) {
            (Self::Lebesgue, SummaryDomain::Cdf) => return Ok(Region::plane()),
            (Self::Lebesgue, SummaryDomain::Qf) => return Ok(Region::unit_square()),
            (Self::LebesgueOnRegion(r), _) => *r,
        };
        for (lo, hi) in [region.x, region.y] {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidParam(format!("region side [{lo}, {hi}] is empty or degenerate")));
            }
            if domain == SummaryDomain::Qf && (lo < 0.0 || hi > 1.0) {
                return Err(Error::InvalidParam(format!("level region [{lo}, {hi}] leaves the unit interval")));
            }
        }
        Ok(region)
    }
}

/// Per-observation interval lengths whose covariance is the summary integral.
struct Weights {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn cdf_lengths(values: &[f64], margin: &EmpiricalDistribution, (lo, hi): (f64, f64)) -> Option<Vec<f64>> {
    let a = lo.max(margin.min());
    let b = hi.min(margin.max());
    if b <= a {
        return None;
    }
    Some(values.iter().map(|&v| (b - v.max(a)).max(0.0)).collect())
}

fn qf_lengths(values: &[f64], margin: &EmpiricalDistribution, (lo, hi): (f64, f64)) -> Option<Vec<f64>> {
    let n = margin.len() as f64;
    // levels beyond the last jump give a constant quantile error
    let top = margin.count_lt(margin.max()) as f64 / n;
    if hi.min(top) <= lo.max(0.0) {
        return None;
    }
    Some(values.iter().map(|&v| (hi - lo.max(margin.count_lt(v) as f64 / n)).max(0.0)).collect())
}

fn weights(sample: &BivariateSample, domain: SummaryDomain, region: Region) -> Result<Weights> {
    let mx = sample.margin_x();
    let my = sample.margin_y();
    let lengths = match domain {
        SummaryDomain::Cdf => cdf_lengths,
        SummaryDomain::Qf => qf_lengths,
    };
    let x = lengths(sample.xs(), &mx, region.x).ok_or(Error::EmptyRegion)?;
    let y = lengths(sample.ys(), &my, region.y).ok_or(Error::EmptyRegion)?;
    Ok(Weights { x, y })
}

/// `(1/n) Σ (a_i - ā)(b_i - b̄)` with correctly rounded sums.
pub fn centred_covariance(a: &[f64], b: &[f64]) -> f64 {
    let ma = exact_mean(a);
    let mb = exact_mean(b);
    exact_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb))) / a.len() as f64
}

fn summary_cov(sample: &BivariateSample, domain: SummaryDomain, spec: &MeasureSpec) -> Result<f64> {
    let region = spec.region(domain)?;
    let w = weights(sample, domain, region)?;
    Ok(centred_covariance(&w.x, &w.y))
}

fn has_constant_margin(sample: &BivariateSample) -> bool {
    sample.margin_x().is_constant() || sample.margin_y().is_constant()
}

/// Integral of the CDF covariance surface over the observation plane (or a
/// rectangle of it). Full-plane Lebesgue gives the `1/n` sample covariance.
pub fn scov_cdf(sample: &BivariateSample, spec: &MeasureSpec) -> Result<f64> {
    if has_constant_margin(sample) {
        return Ok(0.0);
    }
    summary_cov(sample, SummaryDomain::Cdf, spec)
}

/// Integral of the QF covariance surface over the unit square (or a
/// rectangle of levels).
pub fn scov_qf(sample: &BivariateSample, spec: &MeasureSpec) -> Result<f64> {
    if has_constant_margin(sample) {
        return Ok(0.0);
    }
    summary_cov(sample, SummaryDomain::Qf, spec)
}

/// Summary correlation: the integral normalised by the same integral for
/// the comonotone (positive side) or countermonotone (negative side)
/// order-statistic coupling.
pub fn scor(sample: &BivariateSample, domain: SummaryDomain, spec: &MeasureSpec) -> Result<SummaryResult> {
    let region = spec.region(domain)?;
    if has_constant_margin(sample) {
        return Ok(MeasureResult::degenerate());
    }
    let w = weights(sample, domain, region)?;
    let covariance = centred_covariance(&w.x, &w.y);
    let upper = summary_cov(&sample.comonotone_coupling(), domain, spec)?;
    let lower = summary_cov(&sample.countermonotone_coupling(), domain, spec)?;
    let flat = upper <= 0.0 && lower >= 0.0;
    Ok(MeasureResult::normalise(covariance, CouplingBounds { lower, upper }, flat))
}

/// [`scor`] restricted to the rectangle `region`.
pub fn regional_scor(sample: &BivariateSample, domain: SummaryDomain, region: Region) -> Result<SummaryResult> {
    scor(sample, domain, &MeasureSpec::LebesgueOnRegion(region))
}

/// `(1/n) Σ F̂_X(x_i) F̂_Y(y_i) - mean(F̂_X) mean(F̂_Y)`, the rank-PIT
/// (Spearman) covariance.
pub fn pit_covariance(sample: &BivariateSample) -> f64 {
    let px = sample.margin_x().pit(sample.xs());
    let py = sample.margin_y().pit(sample.ys());
    centred_covariance(&px, &py)
}
