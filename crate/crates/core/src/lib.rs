//! Generalised covariance and correlation for bivariate samples.
//!
//! Covariances are built from identification errors of marginal
//! functionals (mean, expectiles, quantiles, thresholds) and normalised by
//! the comonotone and countermonotone couplings of those errors.

pub mod copula;
pub mod error;
pub mod functional;
pub mod gcov;
pub mod grid;
pub mod local;
pub mod numeric;
pub mod sample;
pub mod summary;
pub mod tail;

pub use copula::{
    calibrate_spearman, copula_cdf, population_qfcor, population_tail, sample_copula, CopulaFamily, CopulaSpec, PopulationTail, RngSeed,
};
pub use error::{Error, Result};
pub use functional::{error_series, estimate_functional, ErrorSeries, FunctionalSpec, Identification, Scaled};
pub use gcov::{coupling_bounds, ecor, gcor, gcor_from_series, gcov, mcor, CouplingBounds, MeasureResult};
pub use grid::{
    cdf_surface, cdf_surface_breakpoints, default_levels, global_dependence_classify, qf_surface, surface, DependenceSurface,
    GlobalDependence, GridSpec, SurfaceMeasure,
};
pub use local::{
    blomqvist_beta, pearson_quantile_bounds, qcor, qcov, qmcor, qmcov, tcor, tcov, CorrectedLevels, LocalCounts, LocalEstimator, LocalPoint,
};
pub use sample::{BivariateSample, EmpiricalDistribution, JointCountGrid, NaPolicy};
pub use summary::{pit_covariance, regional_scor, scor, scov_cdf, scov_qf, MeasureSpec, Region, SummaryDomain, SummaryResult};
pub use tail::{tail_curve, tail_estimate, TailClassification, TailCurve, TailLabel, TailSide};
