//! Identification functions, functional estimation and generalised errors.
//!
//! A functional `T` is identified by a map `v(t, x)` whose expectation
//! vanishes at `t = T(X)`. The sample analogue `t̂` solves
//! `(1/n) Σ v(t, x_i) = 0`, and the generalised error of an observation is
//! `v(t̂, x_i)`. Quantiles and thresholds use indicator errors centred at the
//! (corrected) level `F̂(q̂_α)` resp. `F̂(a)`, which are exactly centred even
//! when the margin has ties.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{bisect, exact_mean};
use crate::sample::EmpiricalDistribution;

/// The functional at which dependence is measured for one margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalSpec {
    Mean,
    Expectile { tau: f64 },
    Quantile { alpha: f64 },
    Threshold { point: f64 },
}

impl FunctionalSpec {
    pub fn mean() -> Self {
        Self::Mean
    }

    pub fn expectile(tau: f64) -> Result<Self> {
        check_level(tau)?;
        Ok(Self::Expectile { tau })
    }

    pub fn quantile(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(Self::Quantile { alpha })
    }

    pub fn threshold(point: f64) -> Result<Self> {
        if !point.is_finite() {
            return Err(Error::InvalidParam(format!("threshold point {point} is not finite")));
        }
        Ok(Self::Threshold { point })
    }

    /// Re-checks the parameter ranges of a spec built by hand.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Mean => Ok(()),
            Self::Expectile { tau } => check_level(tau),
            Self::Quantile { alpha } => check_level(alpha),
            Self::Threshold { point } => Self::threshold(point).map(|_| ()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Expectile { .. } => "expectile",
            Self::Quantile { .. } => "quantile",
            Self::Threshold { .. } => "threshold",
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mean => write!(f, "mean"),
            Self::Expectile { tau } => write!(f, "expectile:{tau}"),
            Self::Quantile { alpha } => write!(f, "quantile:{alpha}"),
            Self::Threshold { point } => write!(f, "threshold:{point}"),
        }
    }
}

impl FromStr for FunctionalSpec {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `mean` or `quantile:0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let value = || -> Result<f64> {
            let p = param.ok_or_else(|| Error::InvalidParam(format!("`{kind}` needs a parameter, e.g. `{kind}:0.5`")))?;
            p.parse().map_err(|_| Error::InvalidParam(format!("bad parameter `{p}` in `{s}`")))
        };
        match kind {
            "mean" if param.is_none() => Ok(Self::Mean),
            "expectile" => Self::expectile(value()?),
            "quantile" => Self::quantile(value()?),
            "threshold" => Self::threshold(value()?),
            _ => Err(Error::InvalidParam(format!("unknown functional `{s}`"))),
        }
    }
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(level))
    }
}

/// Identification function for the mean: `x - t`.
pub fn id_mean(t: f64, x: f64) -> f64 {
    x - t
}

/// Identification function for the `tau`-expectile:
/// `2 |1{x <= t} - tau| (x - t)`.
pub fn id_expectile(tau: f64, t: f64, x: f64) -> f64 {
    let indicator = if x <= t { 1.0 } else { 0.0 };
    2.0 * (indicator - tau).abs() * (x - t)
}

/// Identification function for the `alpha`-quantile: `alpha - 1{x <= t}`.
pub fn id_quantile(alpha: f64, t: f64, x: f64) -> f64 {
    if x <= t {
        alpha - 1.0
    } else {
        alpha
    }
}

/// An increasing identification function, the extension point for
/// functionals beyond the built-in families.
pub trait Identification {
    /// `v(t, x)`, increasing in `x`.
    fn evaluate(&self, t: f64, x: f64) -> f64;

    /// Solves the sample moment condition `(1/n) Σ v(t, x_i) = 0`.
    ///
    /// The default brackets the root on `[min, max]` and bisects, which
    /// suits identification functions that decrease in `t`.
    fn fit(&self, margin: &EmpiricalDistribution) -> Result<f64> {
        let xs = margin.sorted_values();
        let moment = |t: f64| exact_mean(&xs.iter().map(|&x| self.evaluate(t, x)).collect::<Vec<_>>());
        let (lo, hi) = (margin.min(), margin.max());
        if lo == hi {
            return Ok(lo);
        }
        let tol = 1e-12 * (hi - lo + 1.0);
        Ok(bisect(moment, lo, hi, tol))
    }
}

impl Identification for FunctionalSpec {
    fn evaluate(&self, t: f64, x: f64) -> f64 {
        match *self {
            Self::Mean => id_mean(t, x),
            Self::Expectile { tau } => id_expectile(tau, t, x),
            Self::Quantile { alpha } => id_quantile(alpha, t, x),
            Self::Threshold { point } => {
                // evaluation functional F(a): v(t, x) = t - 1{x <= a}
                if x <= point {
                    t - 1.0
                } else {
                    t
                }
            }
        }
    }

    fn fit(&self, margin: &EmpiricalDistribution) -> Result<f64> {
        estimate_functional(self, margin)
    }
}

/// An identification function multiplied by a positive constant.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<I> {
    pub inner: I,
    pub factor: f64,
}

impl<I: Identification> Identification for Scaled<I> {
    fn evaluate(&self, t: f64, x: f64) -> f64 {
        self.factor * self.inner.evaluate(t, x)
    }

    fn fit(&self, margin: &EmpiricalDistribution) -> Result<f64> {
        self.inner.fit(margin)
    }
}

/// Sample analogue `t̂` of the functional.
pub fn estimate_functional(spec: &FunctionalSpec, margin: &EmpiricalDistribution) -> Result<f64> {
    match *spec {
        FunctionalSpec::Mean => Ok(exact_mean(margin.sorted_values())),
        FunctionalSpec::Quantile { alpha } => Ok(margin.quantile(alpha)),
        FunctionalSpec::Expectile { tau } => Ok(sample_expectile(tau, margin)),
        FunctionalSpec::Threshold { .. } => Err(Error::UnsupportedFunctional(spec.name())),
    }
}

/// Root of the piecewise-linear, strictly decreasing moment map
/// `t ↦ (1/n) Σ 2|1{x_i <= t} - τ|(x_i - t)`.
///
/// Bisection over the distinct data values brackets the linear piece that
/// holds the root; the root is then solved for on that piece.
fn sample_expectile(tau: f64, margin: &EmpiricalDistribution) -> f64 {
    let xs = margin.sorted_values();
    let n = xs.len();
    if margin.is_constant() {
        return xs[0];
    }
    // prefix[k] = x_(1) + ... + x_(k)
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &x in xs {
        prefix.push(prefix[prefix.len() - 1] + x);
    }
    let total = prefix[n];
    // n/2 times the moment map at t, with k = #{x_i <= t}
    let moment = |k: usize, t: f64| {
        let below = prefix[k] - k as f64 * t;
        let above = (total - prefix[k]) - (n - k) as f64 * t;
        (1.0 - tau) * below + tau * above
    };
    let distinct = margin.distinct();
    // last distinct value where the moment map is still non-negative
    let (mut lo, mut hi) = (0usize, distinct.len() - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let t = distinct[mid];
        if moment(margin.count_le(t), t) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_lo = distinct[lo];
    let k = margin.count_le(t_lo);
    if moment(k, t_lo) == 0.0 {
        return t_lo;
    }
    let t_hi = distinct[hi];
    if moment(margin.count_le(t_hi), t_hi) == 0.0 {
        return t_hi;
    }
    let root = ((1.0 - tau) * prefix[k] + tau * (total - prefix[k])) / ((1.0 - tau) * k as f64 + tau * (n - k) as f64);
    root.clamp(t_lo, t_hi)
}

/// Per-observation generalised errors for one margin.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    values: Vec<f64>,
    functional: FunctionalSpec,
    fitted_value: f64,
    /// `1{x_i <= point}` for quantile and threshold errors.
    indicators: Option<Vec<bool>>,
}

impl ErrorSeries {
    /// Generalised errors of `values` (in their original order) at `spec`.
    ///
    /// `margin` must be the empirical distribution of `values`.
    pub fn new(spec: &FunctionalSpec, values: &[f64], margin: &EmpiricalDistribution) -> Result<Self> {
        spec.validate()?;
        let (point, fitted_value) = match *spec {
            FunctionalSpec::Mean | FunctionalSpec::Expectile { .. } => {
                let t = estimate_functional(spec, margin)?;
                let errors = values.iter().map(|&x| spec.evaluate(t, x)).collect();
                return Ok(Self { values: errors, functional: *spec, fitted_value: t, indicators: None });
            }
            FunctionalSpec::Quantile { alpha } => {
                let q = margin.quantile(alpha);
                (q, q)
            }
            FunctionalSpec::Threshold { point } => (point, margin.cdf(point)),
        };
        let level = margin.cdf(point);
        let indicators: Vec<bool> = values.iter().map(|&x| x <= point).collect();
        let errors = indicators.iter().map(|&i| if i { level - 1.0 } else { level }).collect();
        Ok(Self { values: errors, functional: *spec, fitted_value, indicators: Some(indicators) })
    }

    /// Errors `v(t̂, x_i)` from an arbitrary identification function, with
    /// `t̂` from [`Identification::fit`]. `functional` labels the series.
    pub fn from_identification<I: Identification>(
        id: &I,
        functional: FunctionalSpec,
        values: &[f64],
        margin: &EmpiricalDistribution,
    ) -> Result<Self> {
        let t = id.fit(margin)?;
        Ok(Self { values: values.iter().map(|&x| id.evaluate(t, x)).collect(), functional, fitted_value: t, indicators: None })
    }

    /// Wraps precomputed error values.
    pub fn from_values(values: Vec<f64>, functional: FunctionalSpec, fitted_value: f64) -> Self {
        Self { values, functional, fitted_value, indicators: None }
    }

    /// `1{x_i <= point}` when the errors are centred indicators.
    pub fn indicators(&self) -> Option<&[bool]> {
        self.indicators.as_deref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn functional(&self) -> FunctionalSpec {
        self.functional
    }

    /// `t̂` for mean/expectile/quantile; the level `F̂(a)` for a threshold.
    pub fn fitted_value(&self) -> f64 {
        self.fitted_value
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every error takes the same value.
    pub fn is_constant(&self) -> bool {
        match self.values.first() {
            Some(&first) => self.values.iter().all(|&v| v == first),
            None => true,
        }
    }

    /// Ascending copy of the error values.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Convenience wrapper building the error series of a whole margin.
pub fn error_series(spec: &FunctionalSpec, values: &[f64], margin: &EmpiricalDistribution) -> Result<ErrorSeries> {
    ErrorSeries::new(spec, values, margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exact_sum;
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_values(v)
    }

    #[test]
    fn parse_round_trip() {
        for spec in [
            FunctionalSpec::Mean,
            FunctionalSpec::Expectile { tau: 0.7 },
            FunctionalSpec::Quantile { alpha: 0.25 },
            FunctionalSpec::Threshold { point: -1.5 },
        ] {
            assert_eq!(spec.to_string().parse::<FunctionalSpec>(), Ok(spec));
        }
        assert_eq!("quantile:1.2".parse::<FunctionalSpec>(), Err(Error::LevelOutOfRange(1.2)));
        assert!("quantile".parse::<FunctionalSpec>().is_err());
        assert!("median".parse::<FunctionalSpec>().is_err());
    }

    #[test]
    fn identification_examples() {
        assert_eq!(id_mean(0.0, 1.0), 1.0);
        assert_eq!(id_mean(2.0, 2.0), 0.0);
        assert_eq!(id_mean(-1.0, 1.0), 2.0);
        assert!((id_expectile(0.9, 0.0, 1.0) - 1.8).abs() < 1e-15);
        assert!((id_expectile(0.9, 0.0, -1.0) - -0.2).abs() < 1e-15);
        assert_eq!(id_quantile(0.5, 0.0, 1.0), 0.5);
        assert_eq!(id_quantile(0.5, 0.0, 0.0), -0.5);
        assert!((id_quantile(0.9, 0.0, -1.0) - -0.1).abs() < 1e-15);
    }

    #[test]
    fn expectile_at_half_is_mean_identification() {
        for &(t, x) in &[(0.0, 1.0), (1.5, -2.0), (3.0, 3.0), (-1.0, 4.5)] {
            assert_eq!(id_expectile(0.5, t, x), id_mean(t, x));
        }
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(estimate_functional(&FunctionalSpec::Mean, &dist(&[1.0, 2.0, 3.0])).unwrap(), 2.0);
        let q = FunctionalSpec::quantile(0.5).unwrap();
        assert_eq!(estimate_functional(&q, &dist(&[1.0, 2.0, 3.0, 4.0])).unwrap(), 2.0);
        let e = FunctionalSpec::expectile(0.8).unwrap();
        let t = estimate_functional(&e, &dist(&[0.0, 1.0])).unwrap();
        assert!((t - 0.8).abs() < 1e-12, "{t}");
        let th = FunctionalSpec::threshold(1.0).unwrap();
        assert_eq!(estimate_functional(&th, &dist(&[0.0, 1.0])), Err(Error::UnsupportedFunctional("threshold")));
    }

    #[test]
    fn quantile_estimate_is_inf_of_moment_condition() {
        // inf{t : (1/n) Σ (α - 1{x_i <= t}) <= 0} scanned over breakpoints
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let d = dist(&xs);
        for k in 1..40 {
            let alpha = k as f64 / 40.0;
            let brute = d
                .sorted_values()
                .iter()
                .copied()
                .filter(|&t| xs.iter().map(|&x| id_quantile(alpha, t, x)).sum::<f64>() <= 1e-12)
                .fold(f64::INFINITY, f64::min);
            let q = estimate_functional(&FunctionalSpec::Quantile { alpha }, &d).unwrap();
            assert_eq!(q, brute, "alpha={alpha}");
        }
    }

    #[test]
    fn error_series_examples() {
        let xs = [1.0, 1.0, 2.0, 3.0];
        let e = ErrorSeries::new(&FunctionalSpec::quantile(0.25).unwrap(), &xs, &dist(&xs)).unwrap();
        assert_eq!(e.fitted_value(), 1.0);
        assert_eq!(e.values(), &[-0.5, -0.5, 0.5, 0.5]);

        let xs = [1.0, 2.0];
        let e = ErrorSeries::new(&FunctionalSpec::threshold(1.0).unwrap(), &xs, &dist(&xs)).unwrap();
        assert_eq!(e.values(), &[-0.5, 0.5]);

        let xs = [1.0, 2.0, 3.0];
        let e = ErrorSeries::new(&FunctionalSpec::Mean, &xs, &dist(&xs)).unwrap();
        assert_eq!(e.values(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn threshold_beyond_data_is_constant_zero() {
        let xs = [1.0, 2.0, 3.0];
        let e = ErrorSeries::new(&FunctionalSpec::threshold(3.0).unwrap(), &xs, &dist(&xs)).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
        assert!(e.is_constant());
        let e = ErrorSeries::new(&FunctionalSpec::threshold(0.0).unwrap(), &xs, &dist(&xs)).unwrap();
        assert!(e.is_constant());
    }

    #[test]
    fn invalid_levels_are_rejected() {
        assert_eq!(FunctionalSpec::quantile(0.0), Err(Error::LevelOutOfRange(0.0)));
        assert_eq!(FunctionalSpec::expectile(1.0), Err(Error::LevelOutOfRange(1.0)));
        assert!(FunctionalSpec::threshold(f64::NAN).is_err());
        let xs = [1.0, 2.0];
        assert!(ErrorSeries::new(&FunctionalSpec::Quantile { alpha: 1.5 }, &xs, &dist(&xs)).is_err());
    }

    #[test]
    fn generic_fit_agrees_with_closed_forms() {
        struct Plain(FunctionalSpec);
        impl Identification for Plain {
            fn evaluate(&self, t: f64, x: f64) -> f64 {
                self.0.evaluate(t, x)
            }
        }
        let xs = [0.3, -1.2, 4.4, 2.0, 2.0, 7.1];
        let d = dist(&xs);
        for spec in [FunctionalSpec::Mean, FunctionalSpec::Expectile { tau: 0.2 }, FunctionalSpec::Expectile { tau: 0.9 }] {
            let generic = Plain(spec).fit(&d).unwrap();
            let direct = estimate_functional(&spec, &d).unwrap();
            assert!((generic - direct).abs() < 1e-10, "{spec}: {generic} vs {direct}");
        }
    }

    fn margin_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![(-20i32..20).prop_map(f64::from), -50.0..50.0f64], 1..40)
    }

    fn any_spec() -> impl Strategy<Value = FunctionalSpec> {
        prop_oneof![
            Just(FunctionalSpec::Mean),
            (0.01..0.99f64).prop_map(|tau| FunctionalSpec::Expectile { tau }),
            (0.01..0.99f64).prop_map(|alpha| FunctionalSpec::Quantile { alpha }),
        ]
    }

    proptest! {
        #[test]
        fn errors_are_centred(xs in margin_values(), spec in any_spec(), point in -25.0..25.0f64) {
            let d = dist(&xs);
            let scale = xs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let e = ErrorSeries::new(&spec, &xs, &d).unwrap();
            let mean = exact_sum(e.values().iter().copied()) / xs.len() as f64;
            let tol = match spec {
                FunctionalSpec::Quantile { .. } => 1e-15,
                _ => 1e-12 * scale,
            };
            prop_assert!(mean.abs() <= tol, "{spec}: mean error {mean}");
            let th = ErrorSeries::new(&FunctionalSpec::Threshold { point }, &xs, &d).unwrap();
            let mean = exact_sum(th.values().iter().copied()) / xs.len() as f64;
            prop_assert!(mean.abs() <= 1e-15);
        }

        #[test]
        fn errors_are_monotone_and_change_sign(xs in margin_values(), spec in any_spec()) {
            let d = dist(&xs);
            let e = ErrorSeries::new(&spec, &xs, &d).unwrap();
            let t = e.fitted_value();
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
            for w in idx.windows(2) {
                prop_assert!(e.values()[w[0]] <= e.values()[w[1]]);
            }
            for (x, v) in xs.iter().zip(e.values()) {
                prop_assert!((x - t) * v >= 0.0);
            }
        }

        #[test]
        fn expectile_root_and_monotonicity(xs in margin_values(), t1 in 0.01..0.99f64, t2 in 0.01..0.99f64) {
            let d = dist(&xs);
            let (lo_tau, hi_tau) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let lo = estimate_functional(&FunctionalSpec::Expectile { tau: lo_tau }, &d).unwrap();
            let hi = estimate_functional(&FunctionalSpec::Expectile { tau: hi_tau }, &d).unwrap();
            prop_assert!(lo <= hi + 1e-12 * (d.max() - d.min() + 1.0));
            let tol = 1e-10 * (d.max() - d.min() + 1.0);
            let moment = exact_sum(xs.iter().map(|&x| id_expectile(lo_tau, lo, x))) / xs.len() as f64;
            prop_assert!(moment.abs() <= tol, "moment {moment}");
        }
    }
}
