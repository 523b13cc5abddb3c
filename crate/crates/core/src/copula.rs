//! Copula samplers, copula CDF oracles, population quantile and tail
//! correlations, and Spearman calibration.
//!
//! Sampling uses ChaCha20 seeded with the user seed through
//! `seed_from_u64`; the stream number is `(family tag << 48) | n`, so the
//! same seed drives independent streams for different families and sizes.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::check_level;
use crate::grid::{DependenceSurface, SurfaceMeasure};
use crate::numeric::{bisect, integrate, normal_cdf, normal_quantile, student_t_cdf, student_t_quantile};
use crate::sample::BivariateSample;
use crate::summary::Region;
use crate::tail::{TailCurve, TailSide};

/// Absolute tolerance of the quadrature-based copula CDFs.
pub const CDF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaSpec {
    Independence,
    Comonotone,
    Countermonotone,
    Gaussian {
        r: f64,
    },
    StudentT {
        r: f64,
        nu: f64,
    },
    Clayton {
        theta: f64,
    },
    Gumbel {
        theta: f64,
    },
    /// `Y = 1/2 - X` on `[0, 1/2]`, `Y = 3/2 - X` on `(1/2, 1]`.
    PerfectLocalMedian,
}

/// Seed for [`sample_copula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl CopulaSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        match *self {
            Self::Gaussian { r } if !(r > -1.0 && r < 1.0) => bad(format!("gaussian r={r} outside (-1, 1)")),
            Self::StudentT { r, .. } if !(r > -1.0 && r < 1.0) => bad(format!("student_t r={r} outside (-1, 1)")),
            Self::StudentT { nu, .. } if !(nu > 0.0 && nu.is_finite()) => bad(format!("student_t nu={nu} must be positive")),
            Self::Clayton { theta } if !(theta > 0.0 && theta.is_finite()) => bad(format!("clayton theta={theta} must be positive")),
            Self::Gumbel { theta } if !(theta >= 1.0 && theta.is_finite()) => bad(format!("gumbel theta={theta} must be >= 1")),
            _ => Ok(()),
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Self::Independence => 0,
            Self::Comonotone => 1,
            Self::Countermonotone => 2,
            Self::Gaussian { .. } => 3,
            Self::StudentT { .. } => 4,
            Self::Clayton { .. } => 5,
            Self::Gumbel { .. } => 6,
            Self::PerfectLocalMedian => 7,
        }
    }
}

impl fmt::Display for CopulaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Independence => write!(f, "independence"),
            Self::Comonotone => write!(f, "comonotone"),
            Self::Countermonotone => write!(f, "countermonotone"),
            Self::Gaussian { r } => write!(f, "gaussian:{r}"),
            Self::StudentT { r, nu } => write!(f, "student_t:{r}:{nu}"),
            Self::Clayton { theta } => write!(f, "clayton:{theta}"),
            Self::Gumbel { theta } => write!(f, "gumbel:{theta}"),
            Self::PerfectLocalMedian => write!(f, "perfect_local_median"),
        }
    }
}

impl FromStr for CopulaSpec {
    type Err = Error;

    /// Parses `family[:param[:param]]`, e.g. `clayton:2` or `student_t:0.5:1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let family = parts.next().unwrap_or_default();
        let params: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::InvalidParam(format!("bad copula parameter `{p}`"))))
            .collect::<Result<_>>()?;
        let arity = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!("copula `{family}` takes {k} parameter(s)")))
            }
        };
        let spec = match family {
            "independence" => arity(0).map(|_| Self::Independence),
            "comonotone" => arity(0).map(|_| Self::Comonotone),
            "countermonotone" => arity(0).map(|_| Self::Countermonotone),
            "perfect_local_median" => arity(0).map(|_| Self::PerfectLocalMedian),
            "gaussian" => arity(1).map(|_| Self::Gaussian { r: params[0] }),
            "cauchy" => arity(1).map(|_| Self::StudentT { r: params[0], nu: 1.0 }),
            "student_t" | "t" => arity(2).map(|_| Self::StudentT { r: params[0], nu: params[1] }),
            "clayton" => arity(1).map(|_| Self::Clayton { theta: params[0] }),
            "gumbel" => arity(1).map(|_| Self::Gumbel { theta: params[0] }),
            _ => Err(Error::InvalidParam(format!("unknown copula family `{family}`"))),
        }?;
        spec.validate()?;
        Ok(spec)
    }
}

fn rng_for(spec: &CopulaSpec, n: usize, seed: RngSeed) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
    rng.set_stream((spec.tag() << 48) | (n as u64 & ((1 << 48) - 1)));
    rng
}

fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    rng.sample(Open01)
}

/// Positive stable variate with Laplace transform `exp(-t^alpha)`, `0 < alpha < 1`.
fn positive_stable(rng: &mut ChaCha20Rng, alpha: f64) -> f64 {
    let u = std::f64::consts::PI * uniform(rng);
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = ((1.0 - alpha) * u).sin() / w;
    a * b.powf((1.0 - alpha) / alpha)
}

/// `n` draws from the copula; deterministic given `(spec, n, seed)`.
pub fn sample_copula(spec: &CopulaSpec, n: usize, seed: RngSeed) -> Result<BivariateSample> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_for(spec, n, seed);
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    match *spec {
        CopulaSpec::Independence => {
            for _ in 0..n {
                us.push(uniform(&mut rng));
                vs.push(uniform(&mut rng));
            }
        }
        CopulaSpec::Comonotone => {
            for _ in 0..n {
                let u = uniform(&mut rng);
                us.push(u);
                vs.push(u);
            }
        }
        CopulaSpec::Countermonotone => {
            for _ in 0..n {
                let u = uniform(&mut rng);
                us.push(u);
                vs.push(1.0 - u);
            }
        }
        CopulaSpec::Gaussian { r } => {
            let s = (1.0 - r * r).sqrt();
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                us.push(normal_cdf(z1));
                vs.push(normal_cdf(r * z1 + s * z2));
            }
        }
        CopulaSpec::StudentT { r, nu } => {
            let s = (1.0 - r * r).sqrt();
            let chi = ChiSquared::new(nu).map_err(|e| Error::InvalidParam(e.to_string()))?;
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let scale = (nu / chi.sample(&mut rng)).sqrt();
                us.push(student_t_cdf(z1 * scale, nu));
                vs.push(student_t_cdf((r * z1 + s * z2) * scale, nu));
            }
        }
        CopulaSpec::Clayton { theta } => {
            let frailty = Gamma::new(1.0 / theta, 1.0).map_err(|e| Error::InvalidParam(e.to_string()))?;
            for _ in 0..n {
                let v = frailty.sample(&mut rng);
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                us.push((-(e1 / v).ln_1p() / theta).exp());
                vs.push((-(e2 / v).ln_1p() / theta).exp());
            }
        }
        CopulaSpec::Gumbel { theta: 1.0 } => {
            for _ in 0..n {
                us.push(uniform(&mut rng));
                vs.push(uniform(&mut rng));
            }
        }
        CopulaSpec::Gumbel { theta } => {
            let alpha = 1.0 / theta;
            for _ in 0..n {
                let s = positive_stable(&mut rng, alpha);
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                us.push((-(e1 / s).powf(alpha)).exp());
                vs.push((-(e2 / s).powf(alpha)).exp());
            }
        }
        CopulaSpec::PerfectLocalMedian => {
            for _ in 0..n {
                let u = uniform(&mut rng);
                us.push(u);
                vs.push(if u <= 0.5 { 0.5 - u } else { 1.5 - u });
            }
        }
    }
    BivariateSample::new(us, vs)
}

/// `P(V <= v | U = s)` for the elliptical families.
fn conditional_cdf(spec: &CopulaSpec, s: f64, v: f64) -> f64 {
    match *spec {
        CopulaSpec::Gaussian { r } => {
            let x = normal_quantile(s);
            let y = normal_quantile(v);
            normal_cdf((y - r * x) / (1.0 - r * r).sqrt())
        }
        CopulaSpec::StudentT { r, nu } => {
            let x = student_t_quantile(s, nu);
            let y = student_t_quantile(v, nu);
            let scale = ((nu + x * x) * (1.0 - r * r) / (nu + 1.0)).sqrt();
            student_t_cdf((y - r * x) / scale, nu + 1.0)
        }
        _ => unreachable!("conditional CDF is only used for elliptical copulas"),
    }
}

fn clayton_cdf(theta: f64, u: f64, v: f64) -> f64 {
    // log(u^-θ + v^-θ - 1) without overflow
    let a = -theta * u.ln();
    let b = -theta * v.ln();
    let m = a.max(b);
    let log_sum = m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln();
    (-log_sum / theta).exp().min(u.min(v))
}

fn copula_cdf_unchecked(spec: &CopulaSpec, u: f64, v: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    if u == 1.0 {
        return v;
    }
    if v == 1.0 {
        return u;
    }
    match *spec {
        CopulaSpec::Independence => u * v,
        CopulaSpec::Comonotone => u.min(v),
        CopulaSpec::Countermonotone => (u + v - 1.0).max(0.0),
        CopulaSpec::Gaussian { r: 0.0 } => u * v,
        CopulaSpec::Gaussian { .. } | CopulaSpec::StudentT { .. } => {
            integrate(|s| conditional_cdf(spec, s, v), 0.0, u, CDF_TOLERANCE).clamp((u + v - 1.0).max(0.0), u.min(v))
        }
        CopulaSpec::Clayton { theta } => clayton_cdf(theta, u, v),
        CopulaSpec::Gumbel { theta } => {
            let s = (-u.ln()).powf(theta) + (-v.ln()).powf(theta);
            (-s.powf(1.0 / theta)).exp()
        }
        CopulaSpec::PerfectLocalMedian => {
            let lower = (u.min(0.5) - (0.5 - v).max(0.0)).max(0.0);
            let upper = (u - (1.5 - v).max(0.5)).max(0.0);
            lower + upper
        }
    }
}

/// `C(u, v)`; closed forms where available, conditional-CDF quadrature for
/// the Gaussian and Student-t copulas.
pub fn copula_cdf(spec: &CopulaSpec, u: f64, v: f64) -> Result<f64> {
    spec.validate()?;
    for p in [u, v] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("copula argument {p} outside [0, 1]")));
        }
    }
    Ok(copula_cdf_unchecked(spec, u, v))
}

/// `(C(α,β) - αβ)` normalised by `min(α,β) - αβ` or `|max(α+β-1,0) - αβ|`.
pub fn population_qfcor(spec: &CopulaSpec, alpha: f64, beta: f64) -> Result<f64> {
    check_level(alpha)?;
    check_level(beta)?;
    let c = copula_cdf(spec, alpha, beta)?;
    let product = alpha * beta;
    let cov = c - product;
    let value = if cov >= 0.0 { cov / (alpha.min(beta) - product) } else { cov / ((alpha + beta - 1.0).max(0.0) - product).abs() };
    Ok(value.clamp(-1.0, 1.0))
}

/// Population QF correlation surface on `levels × levels`.
pub fn population_qf_surface(spec: &CopulaSpec, levels: &[f64]) -> Result<DependenceSurface> {
    crate::grid::GridSpec::quantile(levels.to_vec())?;
    let values = levels
        .iter()
        .map(|&a| levels.iter().map(|&b| population_qfcor(spec, a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let degenerate = vec![vec![false; levels.len()]; levels.len()];
    Ok(DependenceSurface { measure: SurfaceMeasure::QfCor, axis_x: levels.to_vec(), axis_y: levels.to_vec(), values, degenerate })
}

/// Coefficients of tail dependence and tail correlations of a copula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationTail {
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub ltcor: f64,
    pub utcor: f64,
}

pub fn population_tail(spec: &CopulaSpec) -> Result<PopulationTail> {
    spec.validate()?;
    let t = |lambda_lower, lambda_upper, ltcor, utcor| Ok(PopulationTail { lambda_lower, lambda_upper, ltcor, utcor });
    match *spec {
        CopulaSpec::Independence | CopulaSpec::Gaussian { .. } => t(0.0, 0.0, 0.0, 0.0),
        CopulaSpec::Comonotone => t(1.0, 1.0, 1.0, 1.0),
        CopulaSpec::Countermonotone | CopulaSpec::PerfectLocalMedian => t(0.0, 0.0, -1.0, -1.0),
        CopulaSpec::Clayton { theta } => {
            let l = 2f64.powf(-1.0 / theta);
            t(l, 0.0, l, 0.0)
        }
        CopulaSpec::Gumbel { theta } => {
            let u = 2.0 - 2f64.powf(1.0 / theta);
            t(0.0, u, 0.0, u)
        }
        CopulaSpec::StudentT { .. } => Err(Error::Unsupported("student_t tail limits; evaluate a population tail curve instead".into())),
    }
}

/// Tail curve of the copula itself; `n` is the nominal sample size used by
/// the occupancy rule when the curve is classified.
pub fn population_tail_curve(spec: &CopulaSpec, side: TailSide, levels: &[f64], n: usize) -> Result<TailCurve> {
    let mut curve = TailCurve { side, n, levels: Vec::new(), qcor_values: Vec::new(), lambda_values: Vec::new(), n_corner: Vec::new() };
    let mut ordered = levels.to_vec();
    ordered.sort_by(|a, b| match side {
        TailSide::Lower => b.total_cmp(a),
        TailSide::Upper => a.total_cmp(b),
    });
    ordered.dedup();
    for alpha in ordered {
        let qcor = population_qfcor(spec, alpha, alpha)?;
        let c = copula_cdf(spec, alpha, alpha)?;
        let (corner, lambda) = match side {
            TailSide::Lower => (c, c / alpha),
            TailSide::Upper => {
                let survival = 1.0 - 2.0 * alpha + c;
                (survival, survival / (1.0 - alpha))
            }
        };
        curve.levels.push(alpha);
        curve.qcor_values.push(qcor);
        curve.lambda_values.push(lambda.clamp(0.0, 1.0));
        curve.n_corner.push((corner * n as f64).round() as u64);
    }
    Ok(curve)
}

/// `∬_R (C(α,β) - αβ) dα dβ` over a rectangle of levels.
pub fn population_scov_qf(spec: &CopulaSpec, region: Region, tol: f64) -> Result<f64> {
    spec.validate()?;
    let (x0, x1) = region.x;
    let (y0, y1) = region.y;
    if !(0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0) {
        return Err(Error::InvalidParam("level region must lie inside the unit square".into()));
    }
    let inner_tol = tol / (x1 - x0);
    Ok(integrate(|u| integrate(|v| copula_cdf_unchecked(spec, u, v) - u * v, y0, y1, inner_tol), x0, x1, tol))
}

/// Families with a one-parameter Spearman calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaFamily {
    Gaussian,
    StudentT { nu: f64 },
    Clayton,
    Gumbel,
}

impl CopulaFamily {
    fn with_param(self, p: f64) -> CopulaSpec {
        match self {
            Self::Gaussian => CopulaSpec::Gaussian { r: p },
            Self::StudentT { nu } => CopulaSpec::StudentT { r: p, nu },
            Self::Clayton => CopulaSpec::Clayton { theta: p },
            Self::Gumbel => CopulaSpec::Gumbel { theta: p },
        }
    }

    fn bracket(self) -> (f64, f64) {
        match self {
            Self::Gaussian | Self::StudentT { .. } => (-1.0 + 1e-9, 1.0 - 1e-9),
            Self::Clayton => (1e-6, 100.0),
            Self::Gumbel => (1.0, 50.0),
        }
    }
}

impl FromStr for CopulaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "gaussian" => Ok(Self::Gaussian),
            None if s == "clayton" => Ok(Self::Clayton),
            None if s == "gumbel" => Ok(Self::Gumbel),
            None if s == "cauchy" => Ok(Self::StudentT { nu: 1.0 }),
            Some(("student_t" | "t", nu)) => nu
                .parse::<f64>()
                .ok()
                .filter(|nu| *nu > 0.0)
                .map(|nu| Self::StudentT { nu })
                .ok_or_else(|| Error::InvalidParam(format!("bad degrees of freedom `{nu}`"))),
            _ => Err(Error::InvalidParam(format!("unknown copula family `{s}`"))),
        }
    }
}

/// Spearman's ρ of a copula, `12 ∬ C - 3`, by two-dimensional quadrature
/// to absolute tolerance `tol` on the double integral.
pub fn spearman_rho(spec: &CopulaSpec, tol: f64) -> Result<f64> {
    spec.validate()?;
    let double = match *spec {
        CopulaSpec::Gaussian { .. } | CopulaSpec::StudentT { .. } => {
            // ∬ C(u,v) du dv = ∫ (1-s) ∫ P(V <= v | U = s) dv ds
            integrate(|s| (1.0 - s) * integrate(|v| conditional_cdf(spec, s, v), 0.0, 1.0, tol), 0.0, 1.0, tol)
        }
        _ => integrate(|u| integrate(|v| copula_cdf_unchecked(spec, u, v), 0.0, 1.0, tol), 0.0, 1.0, tol),
    };
    Ok(12.0 * double - 3.0)
}

/// Bisection tolerance in the copula parameter.
pub const CALIBRATION_TOLERANCE: f64 = 1e-6;

/// Parameter of `family` whose Spearman's ρ equals `target`.
pub fn calibrate_spearman(family: CopulaFamily, target: f64) -> Result<CopulaSpec> {
    let unattainable = Error::TargetUnattainable { target };
    if !(target > -1.0 && target < 1.0) {
        return Err(unattainable);
    }
    if let CopulaFamily::StudentT { nu } = family {
        if nu.is_nan() || nu <= 0.0 {
            return Err(Error::InvalidParam(format!("nu={nu} must be positive")));
        }
    }
    let rho = |p: f64| spearman_rho(&family.with_param(p), 1e-7).expect("bracket parameters are valid");
    let (lo, hi) = family.bracket();
    let (r_lo, r_hi) = (rho(lo), rho(hi));
    if target < r_lo.min(r_hi) || target > r_lo.max(r_hi) {
        return Err(unattainable);
    }
    if target == r_lo {
        return Ok(family.with_param(lo));
    }
    let p = bisect(|p| rho(p) - target, lo, hi, CALIBRATION_TOLERANCE);
    Ok(family.with_param(p))
}

/// Marginal applied to copula draws by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marginal {
    Uniform,
    Normal,
    Exponential,
}

impl Marginal {
    pub fn transform(self, u: f64) -> f64 {
        match self {
            Self::Uniform => u,
            Self::Normal => normal_quantile(u),
            Self::Exponential => -(-u).ln_1p(),
        }
    }
}

impl FromStr for Marginal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "normal" => Ok(Self::Normal),
            "exponential" => Ok(Self::Exponential),
            _ => Err(Error::InvalidParam(format!("unknown marginal `{s}`"))),
        }
    }
}
