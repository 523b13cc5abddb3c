//! Generalised covariance of two error series, its Fréchet–Hoeffding
//! coupling bounds, and the sign-dependent generalised correlation.
//!
//! All sums use [`exact_sum`], so a covariance and a coupling bound built
//! from the same multiset of products are bit-identical. That is what makes
//! comonotone (countermonotone) data come out at exactly `1` (`-1`).
//! Pairs of indicator errors (quantiles, thresholds) are evaluated from
//! integer counts, matching the local measures bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{ErrorSeries, FunctionalSpec};
use crate::local::LocalCounts;
use crate::numeric::exact_sum;
use crate::sample::BivariateSample;

/// Covariances of the countermonotone (`lower`) and comonotone (`upper`)
/// couplings with the observed marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingBounds {
    pub lower: f64,
    pub upper: f64,
}

/// A covariance together with its bounds and normalised correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub covariance: f64,
    pub bounds: CouplingBounds,
    pub correlation: f64,
    /// Set when an error series is constant; the correlation is then 0.
    pub degenerate: bool,
}

impl MeasureResult {
    /// Applies the sign-dependent normalisation to `covariance`.
    pub fn normalise(covariance: f64, bounds: CouplingBounds, degenerate: bool) -> Self {
        let correlation = if degenerate {
            0.0
        } else if covariance >= 0.0 {
            if bounds.upper > 0.0 {
                covariance / bounds.upper
            } else {
                0.0
            }
        } else if bounds.lower < 0.0 {
            covariance / bounds.lower.abs()
        } else {
            0.0
        };
        Self { covariance, bounds, correlation: correlation.clamp(-1.0, 1.0), degenerate }
    }

    /// The result reported when either error series is constant.
    pub fn degenerate() -> Self {
        Self::normalise(0.0, CouplingBounds { lower: 0.0, upper: 0.0 }, true)
    }
}

fn check_lengths(ex: &ErrorSeries, ey: &ErrorSeries) -> Result<()> {
    if ex.len() != ey.len() {
        return Err(Error::LengthMismatch { left: ex.len(), right: ey.len() });
    }
    if ex.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(())
}

/// Joint and marginal counts when both series are centred indicators.
fn indicator_counts(ex: &ErrorSeries, ey: &ErrorSeries) -> Option<LocalCounts> {
    let (ix, iy) = (ex.indicators()?, ey.indicators()?);
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as u64;
    let joint = ix.iter().zip(iy).filter(|(a, b)| **a && **b).count() as u64;
    Some(LocalCounts { n: ix.len() as u64, joint, x: count(ix), y: count(iy) })
}

/// `(1/n) Σ ex_i ey_i` over the observed pairing.
pub fn gcov(ex: &ErrorSeries, ey: &ErrorSeries) -> Result<f64> {
    check_lengths(ex, ey)?;
    if let Some(counts) = indicator_counts(ex, ey) {
        return Ok(counts.covariance());
    }
    let products = ex.values().iter().zip(ey.values()).map(|(a, b)| a * b);
    Ok(exact_sum(products) / ex.len() as f64)
}

/// Covariances of the order-statistic couplings: ascending with ascending
/// (upper) and ascending with descending (lower).
pub fn coupling_bounds(ex: &ErrorSeries, ey: &ErrorSeries) -> Result<CouplingBounds> {
    check_lengths(ex, ey)?;
    if let Some(counts) = indicator_counts(ex, ey) {
        return Ok(counts.result().bounds);
    }
    let n = ex.len() as f64;
    let sx = ex.sorted_values();
    let sy = ey.sorted_values();
    let upper = exact_sum(sx.iter().zip(&sy).map(|(a, b)| a * b)) / n;
    let lower = exact_sum(sx.iter().zip(sy.iter().rev()).map(|(a, b)| a * b)) / n;
    Ok(CouplingBounds { lower, upper })
}

/// Generalised correlation of two precomputed error series.
pub fn gcor_from_series(ex: &ErrorSeries, ey: &ErrorSeries) -> Result<MeasureResult> {
    check_lengths(ex, ey)?;
    if let Some(counts) = indicator_counts(ex, ey) {
        return Ok(counts.result());
    }
    let covariance = gcov(ex, ey)?;
    let bounds = coupling_bounds(ex, ey)?;
    let degenerate = ex.is_constant() || ey.is_constant();
    Ok(MeasureResult::normalise(covariance, bounds, degenerate))
}

/// Generalised correlation of `sample` at the functionals `spec_x`, `spec_y`.
pub fn gcor(sample: &BivariateSample, spec_x: &FunctionalSpec, spec_y: &FunctionalSpec) -> Result<MeasureResult> {
    let (ex, ey) = error_pair(sample, spec_x, spec_y)?;
    gcor_from_series(&ex, &ey)
}

/// Error series of both margins of `sample`.
pub fn error_pair(sample: &BivariateSample, spec_x: &FunctionalSpec, spec_y: &FunctionalSpec) -> Result<(ErrorSeries, ErrorSeries)> {
    let ex = ErrorSeries::new(spec_x, sample.xs(), &sample.margin_x())?;
    let ey = ErrorSeries::new(spec_y, sample.ys(), &sample.margin_y())?;
    Ok((ex, ey))
}

/// Mean correlation (mean/mean generalised correlation).
pub fn mcor(sample: &BivariateSample) -> Result<MeasureResult> {
    gcor(sample, &FunctionalSpec::Mean, &FunctionalSpec::Mean)
}

/// Expectile correlation at levels `tau` (x) and `eta` (y).
pub fn ecor(sample: &BivariateSample, tau: f64, eta: f64) -> Result<MeasureResult> {
    gcor(sample, &FunctionalSpec::expectile(tau)?, &FunctionalSpec::expectile(eta)?)
}
