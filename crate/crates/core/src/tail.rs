//! Tail correlations as diagonal quantile correlations, empirical
//! coefficients of tail dependence, and tail classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::check_level;
use crate::local::LocalEstimator;
use crate::sample::BivariateSample;

/// Minimum expected number of observations beyond the level.
pub const MIN_TAIL_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Lower,
    Upper,
}

impl TailSide {
    /// Expected number of observations beyond level `alpha`.
    pub fn occupancy(self, n: usize, alpha: f64) -> f64 {
        match self {
            Self::Lower => n as f64 * alpha,
            Self::Upper => n as f64 * (1.0 - alpha),
        }
    }

    /// Distance of `alpha` from the extreme end of `(0, 1)`.
    fn extremity(self, alpha: f64) -> f64 {
        match self {
            Self::Lower => alpha,
            Self::Upper => 1.0 - alpha,
        }
    }
}

impl fmt::Display for TailSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lower => "lower",
            Self::Upper => "upper",
        })
    }
}

impl FromStr for TailSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Self::Lower),
            "upper" => Ok(Self::Upper),
            _ => Err(Error::InvalidParam(format!("unknown tail side `{s}`"))),
        }
    }
}

/// `0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001` for the lower tail and their
/// complements for the upper tail.
pub fn default_tail_levels(side: TailSide) -> Vec<f64> {
    let lower = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
    match side {
        TailSide::Lower => lower.to_vec(),
        TailSide::Upper => lower.iter().map(|a| 1.0 - a).collect(),
    }
}

/// Diagonal quantile correlations and tail-dependence coefficient
/// estimates along levels ordered toward the extreme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub side: TailSide,
    /// Sample size the curve was computed from.
    pub n: usize,
    pub levels: Vec<f64>,
    pub qcor_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    /// Joint corner count at each level.
    pub n_corner: Vec<u64>,
}

/// Sort levels toward the extreme and drop duplicates.
fn order_levels(side: TailSide, levels: &[f64]) -> Result<Vec<f64>> {
    if levels.is_empty() {
        return Err(Error::EmptyGrid);
    }
    levels.iter().try_for_each(|&l| check_level(l))?;
    let mut ordered = levels.to_vec();
    ordered.sort_by(|a, b| side.extremity(*b).total_cmp(&side.extremity(*a)));
    ordered.dedup();
    Ok(ordered)
}

/// Tail curve of `sample` on `levels`.
pub fn tail_curve(sample: &BivariateSample, side: TailSide, levels: &[f64]) -> Result<TailCurve> {
    let levels = order_levels(side, levels)?;
    let est = LocalEstimator::new(sample);
    let n = sample.len();
    let mut qcor_values = Vec::with_capacity(levels.len());
    let mut lambda_values = Vec::with_capacity(levels.len());
    let mut n_corner = Vec::with_capacity(levels.len());
    for &alpha in &levels {
        let counts = est.quantile_counts(alpha, alpha)?;
        qcor_values.push(counts.result().correlation);
        // λ̂_l = F̂(q̂,q̂)/u* and λ̂_u = C̄̂(q̂,q̂)/(1-u*), as count ratios
        let (corner, lambda) = match side {
            TailSide::Lower => (counts.joint, counts.joint as f64 / counts.x as f64),
            TailSide::Upper => {
                let corner = counts.n + counts.joint - counts.x - counts.y;
                let beyond = counts.n - counts.x;
                let lambda = if beyond == 0 { 0.0 } else { corner as f64 / beyond as f64 };
                (corner, lambda)
            }
        };
        n_corner.push(corner);
        lambda_values.push(lambda.clamp(0.0, 1.0));
    }
    Ok(TailCurve { side, n, levels, qcor_values, lambda_values, n_corner })
}

impl TailCurve {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// CSV with columns `side,level,qcor,lambda,n_corner`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side,level,qcor,lambda,n_corner\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{}\n",
                self.side, self.levels[i], self.qcor_values[i], self.lambda_values[i], self.n_corner[i]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailLabel {
    PositivelyDependent,
    NegativelyDependent,
    Independent,
    Comonotonic,
    Countermonotonic,
}

impl fmt::Display for TailLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PositivelyDependent => "positively_dependent",
            Self::NegativelyDependent => "negatively_dependent",
            Self::Independent => "independent",
            Self::Comonotonic => "comonotonic",
            Self::Countermonotonic => "countermonotonic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailClassification {
    pub label: TailLabel,
    /// Diagonal quantile correlation at `level`.
    pub estimate: f64,
    /// Most extreme level meeting the occupancy rule.
    pub level: f64,
    pub tolerance: f64,
}

/// Label a tail estimate with tolerance `tol`.
pub fn classify(estimate: f64, tol: f64) -> TailLabel {
    if (estimate - 1.0).abs() <= tol {
        TailLabel::Comonotonic
    } else if (estimate + 1.0).abs() <= tol {
        TailLabel::Countermonotonic
    } else if estimate > tol {
        TailLabel::PositivelyDependent
    } else if estimate < -tol {
        TailLabel::NegativelyDependent
    } else {
        TailLabel::Independent
    }
}

/// Classify the tail from the most extreme level with at least
/// [`MIN_TAIL_COUNT`] expected observations, using tolerance `2/√(n·α)`.
pub fn tail_estimate(curve: &TailCurve) -> Result<TailClassification> {
    let insufficient = Error::InsufficientTailData { min_count: MIN_TAIL_COUNT };
    if curve.is_empty() {
        return Err(insufficient);
    }
    let (level, estimate, occupancy) = curve
        .levels
        .iter()
        .zip(&curve.qcor_values)
        .map(|(&l, &q)| (l, q, curve.side.occupancy(curve.n, l)))
        .filter(|&(_, _, occ)| occ >= MIN_TAIL_COUNT as f64)
        .min_by(|a, b| curve.side.extremity(a.0).total_cmp(&curve.side.extremity(b.0)))
        .ok_or(insufficient)?;
    let tolerance = 2.0 / occupancy.sqrt();
    Ok(TailClassification { label: classify(estimate, tolerance), estimate, level, tolerance })
}
