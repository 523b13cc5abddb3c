//! Local measures: threshold and quantile covariances/correlations with
//! their closed-form Fréchet–Hoeffding normalisations, quantile-mean
//! measures and Blomqvist's β.
//!
//! Threshold and quantile measures depend on the sample only through three
//! counts, so they are computed from integers: the covariance, both bounds
//! and the correlation are each a single correctly rounded division.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::functional::{check_level, ErrorSeries, FunctionalSpec};
use crate::gcov::{gcor_from_series, gcov, CouplingBounds, MeasureResult};
use crate::numeric::exact_mean;
use crate::sample::{BivariateSample, EmpiricalDistribution};

/// Where a local measure is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LocalPoint {
    Threshold { a: f64, b: f64 },
    Quantile { alpha: f64, beta: f64 },
}

/// Corrected quantile levels `u* = F̂_X(q̂_α)`, `v* = F̂_Y(q̂_β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedLevels {
    pub u_star: f64,
    pub v_star: f64,
}

/// Joint and marginal counts at a point `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalCounts {
    pub n: u64,
    /// `#{x_i <= a, y_i <= b}`
    pub joint: u64,
    /// `#{x_i <= a}`
    pub x: u64,
    /// `#{y_i <= b}`
    pub y: u64,
}

impl LocalCounts {
    fn numerators(&self) -> (i128, i128, i128) {
        let (n, j, cx, cy) = (self.n as i128, self.joint as i128, self.x as i128, self.y as i128);
        let product = cx * cy;
        let cov = n * j - product;
        let upper = n * cx.min(cy) - product;
        let lower = n * (cx + cy - n).max(0) - product;
        (cov, lower, upper)
    }

    /// `F̂_{X,Y}(a,b) - F̂_X(a) F̂_Y(b)`.
    pub fn covariance(&self) -> f64 {
        let n = self.n as i128;
        self.numerators().0 as f64 / (n * n) as f64
    }

    /// A margin sits at an empty or full level, so its error is constant.
    pub fn is_degenerate(&self) -> bool {
        self.x == 0 || self.x == self.n || self.y == 0 || self.y == self.n
    }

    /// Covariance normalised by `min(u,v) - uv` (positive side) or
    /// `|max(u+v-1, 0) - uv|` (negative side).
    pub fn result(&self) -> MeasureResult {
        let n = self.n as i128;
        let denom = (n * n) as f64;
        let (cov, lower, upper) = self.numerators();
        let bounds = CouplingBounds { lower: lower as f64 / denom, upper: upper as f64 / denom };
        let degenerate = self.is_degenerate();
        let correlation = if degenerate {
            0.0
        } else if cov >= 0 {
            cov as f64 / upper as f64
        } else {
            cov as f64 / lower.abs() as f64
        };
        MeasureResult { covariance: cov as f64 / denom, bounds, correlation, degenerate }
    }
}

/// Sample with both margins sorted once, for repeated local evaluations.
#[derive(Debug, Clone)]
pub struct LocalEstimator<'a> {
    sample: &'a BivariateSample,
    margin_x: EmpiricalDistribution,
    margin_y: EmpiricalDistribution,
}

impl<'a> LocalEstimator<'a> {
    pub fn new(sample: &'a BivariateSample) -> Self {
        Self { sample, margin_x: sample.margin_x(), margin_y: sample.margin_y() }
    }

    pub fn sample(&self) -> &BivariateSample {
        self.sample
    }

    pub fn margin_x(&self) -> &EmpiricalDistribution {
        &self.margin_x
    }

    pub fn margin_y(&self) -> &EmpiricalDistribution {
        &self.margin_y
    }

    pub fn threshold_counts(&self, a: f64, b: f64) -> LocalCounts {
        LocalCounts {
            n: self.sample.len() as u64,
            joint: self.sample.joint_count(a, b) as u64,
            x: self.margin_x.count_le(a) as u64,
            y: self.margin_y.count_le(b) as u64,
        }
    }

    /// Sample quantiles `(q̂_α(X), q̂_β(Y))`.
    pub fn quantiles(&self, alpha: f64, beta: f64) -> Result<(f64, f64)> {
        check_level(alpha)?;
        check_level(beta)?;
        Ok((self.margin_x.quantile(alpha), self.margin_y.quantile(beta)))
    }

    pub fn quantile_counts(&self, alpha: f64, beta: f64) -> Result<LocalCounts> {
        let (qa, qb) = self.quantiles(alpha, beta)?;
        Ok(self.threshold_counts(qa, qb))
    }

    pub fn corrected_levels(&self, alpha: f64, beta: f64) -> Result<CorrectedLevels> {
        let (qa, qb) = self.quantiles(alpha, beta)?;
        Ok(CorrectedLevels { u_star: self.margin_x.cdf(qa), v_star: self.margin_y.cdf(qb) })
    }

    pub fn tcov(&self, a: f64, b: f64) -> f64 {
        self.threshold_counts(a, b).covariance()
    }

    pub fn tcor(&self, a: f64, b: f64) -> MeasureResult {
        self.threshold_counts(a, b).result()
    }

    pub fn qcov(&self, alpha: f64, beta: f64) -> Result<(f64, CorrectedLevels)> {
        let counts = self.quantile_counts(alpha, beta)?;
        Ok((counts.covariance(), self.corrected_levels(alpha, beta)?))
    }

    pub fn qcor(&self, alpha: f64, beta: f64) -> Result<MeasureResult> {
        Ok(self.quantile_counts(alpha, beta)?.result())
    }

    pub fn evaluate(&self, point: LocalPoint) -> Result<MeasureResult> {
        match point {
            LocalPoint::Threshold { a, b } => Ok(self.tcor(a, b)),
            LocalPoint::Quantile { alpha, beta } => self.qcor(alpha, beta),
        }
    }
}

/// Threshold covariance `F̂_{X,Y}(a,b) - F̂_X(a) F̂_Y(b)`.
pub fn tcov(sample: &BivariateSample, a: f64, b: f64) -> f64 {
    LocalEstimator::new(sample).tcov(a, b)
}

/// Threshold correlation at `(a, b)`.
pub fn tcor(sample: &BivariateSample, a: f64, b: f64) -> MeasureResult {
    LocalEstimator::new(sample).tcor(a, b)
}

/// Quantile covariance at levels `(α, β)` and the corrected levels used.
pub fn qcov(sample: &BivariateSample, alpha: f64, beta: f64) -> Result<(f64, CorrectedLevels)> {
    LocalEstimator::new(sample).qcov(alpha, beta)
}

/// Quantile correlation at levels `(α, β)`.
pub fn qcor(sample: &BivariateSample, alpha: f64, beta: f64) -> Result<MeasureResult> {
    LocalEstimator::new(sample).qcor(alpha, beta)
}

/// Blomqvist's β, `4 F̂_{X,Y}(med_X, med_Y) - 1`.
///
/// Returns 0 when a median sits at the sample maximum (constant margin),
/// in line with the degenerate rule for median correlation.
pub fn blomqvist_beta(sample: &BivariateSample) -> f64 {
    let est = LocalEstimator::new(sample);
    let counts = est.quantile_counts(0.5, 0.5).expect("0.5 is a valid level");
    if counts.is_degenerate() {
        return 0.0;
    }
    let (n, j) = (counts.n as i128, counts.joint as i128);
    (4 * j - n) as f64 / n as f64
}

/// Fréchet–Hoeffding bounds of the quantile errors at levels `(α, β)`
/// rescaled by the Cauchy–Schwarz normaliser `√(α(1-α)β(1-β))`: the range
/// of the Pearson correlation of the two quantile errors.
///
/// Levels whose floating-point sum is exactly 1 are treated as
/// complementary, so the lower bound is -1 there.
pub fn pearson_quantile_bounds(alpha: f64, beta: f64) -> Result<CouplingBounds> {
    check_level(alpha)?;
    check_level(beta)?;
    let (lo, hi) = if alpha <= beta { (alpha, beta) } else { (beta, alpha) };
    let scale = ((alpha * (1.0 - alpha)) * (beta * (1.0 - beta))).sqrt();
    let upper = lo * (1.0 - hi) / scale;
    let lower = if alpha + beta == 1.0 {
        -1.0
    } else if alpha + beta > 1.0 {
        -((1.0 - alpha) * (1.0 - beta)) / scale
    } else {
        -(alpha * beta) / scale
    };
    Ok(CouplingBounds { lower, upper })
}

/// Error series of the quantile-mean pair: raw-level quantile errors
/// `α - 1{x_i <= q̂_α}` and mean errors `y_i - ȳ`.
pub fn quantile_mean_errors(sample: &BivariateSample, alpha: f64) -> Result<(ErrorSeries, ErrorSeries)> {
    check_level(alpha)?;
    let q = sample.margin_x().quantile(alpha);
    let ex: Vec<f64> = sample.xs().iter().map(|&x| if x <= q { alpha - 1.0 } else { alpha }).collect();
    let ybar = exact_mean(sample.ys());
    let ey: Vec<f64> = sample.ys().iter().map(|&y| y - ybar).collect();
    Ok((ErrorSeries::from_values(ex, FunctionalSpec::Quantile { alpha }, q), ErrorSeries::from_values(ey, FunctionalSpec::Mean, ybar)))
}

/// Quantile-mean covariance `(1/n) Σ (α - 1{x_i <= q̂_α})(y_i - ȳ)`.
pub fn qmcov(sample: &BivariateSample, alpha: f64) -> Result<f64> {
    let (ex, ey) = quantile_mean_errors(sample, alpha)?;
    gcov(&ex, &ey)
}

/// Quantile-mean correlation, normalised by the order-statistic couplings.
pub fn qmcor(sample: &BivariateSample, alpha: f64) -> Result<MeasureResult> {
    let (ex, ey) = quantile_mean_errors(sample, alpha)?;
    gcor_from_series(&ex, &ey)
}
