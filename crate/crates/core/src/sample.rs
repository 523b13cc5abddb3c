//! Paired observations, marginal empirical distributions and the joint
//! empirical CDF.

use crate::error::{Error, Result};

/// How incomplete or non-finite pairs are handled on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NaPolicy {
    /// Drop every pair in which either coordinate is not finite.
    #[default]
    DropPairwise,
}

/// Paired observations `(x_i, y_i)`, all finite, at least one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl BivariateSample {
    /// Builds a sample from fully finite data.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = xs.iter().zip(&ys).position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { xs, ys })
    }

    /// Builds a sample after removing non-finite pairs; retained pairs keep
    /// their input order.
    pub fn with_policy(xs: &[f64], ys: &[f64], policy: NaPolicy) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
        }
        let NaPolicy::DropPairwise = policy;
        let (kept_x, kept_y): (Vec<f64>, Vec<f64>) =
            xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(&x, &y)| (x, y)).unzip();
        Self::new(kept_x, kept_y)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Always false: a sample holds at least one pair.
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// The sample with the roles of the two margins exchanged.
    pub fn swapped(&self) -> Self {
        Self { xs: self.ys.clone(), ys: self.xs.clone() }
    }

    /// Applies `fx` to every x and `fy` to every y.
    pub fn map_margins(&self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.xs.iter().map(|&x| fx(x)).collect(), self.ys.iter().map(|&y| fy(y)).collect())
    }

    pub fn margin_x(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::from_values(&self.xs)
    }

    pub fn margin_y(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::from_values(&self.ys)
    }

    /// Comonotone order-statistic coupling `(X_(i), Y_(i))`.
    pub fn comonotone_coupling(&self) -> Self {
        Self { xs: sorted(&self.xs), ys: sorted(&self.ys) }
    }

    /// Countermonotone order-statistic coupling `(X_(i), Y_(n-i+1))`.
    pub fn countermonotone_coupling(&self) -> Self {
        let mut ys = sorted(&self.ys);
        ys.reverse();
        Self { xs: sorted(&self.xs), ys }
    }

    /// Number of pairs with `x <= a` and `y <= b`.
    pub fn joint_count(&self, a: f64, b: f64) -> usize {
        self.pairs().filter(|&(x, y)| x <= a && y <= b).count()
    }

    /// Joint empirical CDF `#{x_i <= a, y_i <= b} / n`.
    pub fn joint_cdf(&self, a: f64, b: f64) -> f64 {
        self.joint_count(a, b) as f64 / self.len() as f64
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Step-function empirical CDF of one margin.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Sorts `values`; the caller guarantees they are finite and non-empty.
    pub fn from_values(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "empirical distribution of an empty margin");
        Self { sorted: sorted(values) }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    pub fn is_constant(&self) -> bool {
        self.min() == self.max()
    }

    /// `#{value_i <= t}`.
    pub fn count_le(&self, t: f64) -> usize {
        self.sorted.partition_point(|&v| v <= t)
    }

    /// `#{value_i < t}`.
    pub fn count_lt(&self, t: f64) -> usize {
        self.sorted.partition_point(|&v| v < t)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.len() as f64
    }

    /// Smallest `k` in `1..=n` with `k / n >= alpha`, comparing in the same
    /// floating-point form that [`cdf`](Self::cdf) produces.
    pub fn quantile_rank(&self, alpha: f64) -> usize {
        let n = self.len();
        let nf = n as f64;
        let mut k = ((alpha * nf).ceil() as usize).clamp(1, n);
        while k > 1 && (k - 1) as f64 / nf >= alpha {
            k -= 1;
        }
        while k < n && (k as f64) / nf < alpha {
            k += 1;
        }
        k
    }

    /// Lower quantile `inf{t : F(t) >= alpha} = X_(ceil(n alpha))`.
    pub fn quantile(&self, alpha: f64) -> f64 {
        self.sorted[self.quantile_rank(alpha) - 1]
    }

    /// Probability integral transform `F(v)` of each value, in input order.
    pub fn pit(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.cdf(v)).collect()
    }

    /// Distinct values in ascending order.
    pub fn distinct(&self) -> Vec<f64> {
        let mut d = self.sorted.clone();
        d.dedup();
        d
    }
}

/// Exact joint counts `#{x_i <= a_k, y_i <= b_l}` on a whole threshold grid.
///
/// Each point is bucketed into the first grid cell that covers it, then a
/// two-dimensional prefix sum turns bucket counts into cumulative counts.
/// Thresholds must be non-decreasing; repeated thresholds are allowed.
#[derive(Debug, Clone)]
pub struct JointCountGrid {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl JointCountGrid {
    pub fn new(sample: &BivariateSample, ax: &[f64], by: &[f64]) -> Self {
        let rows = ax.len();
        let cols = by.len();
        let mut counts = vec![0u64; rows * cols];
        for (x, y) in sample.pairs() {
            let i = ax.partition_point(|&a| a < x);
            let j = by.partition_point(|&b| b < y);
            if i < rows && j < cols {
                counts[i * cols + j] += 1;
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let mut c = counts[i * cols + j];
                if i > 0 {
                    c += counts[(i - 1) * cols + j];
                }
                if j > 0 {
                    c += counts[i * cols + j - 1];
                }
                if i > 0 && j > 0 {
                    c -= counts[(i - 1) * cols + j - 1];
                }
                counts[i * cols + j] = c;
            }
        }
        Self { rows, cols, counts }
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.rows && j < self.cols);
        self.counts[i * self.cols + j]
    }
}
