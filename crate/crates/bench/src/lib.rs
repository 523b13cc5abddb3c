//! Shared fixtures for the benchmarks.

use gcor_core::{sample_copula, BivariateSample, CopulaSpec, RngSeed};

/// Gaussian-copula sample with `r = 0.5` and `n` observations.
pub fn gaussian_sample(n: usize) -> BivariateSample {
    sample_copula(&CopulaSpec::Gaussian { r: 0.5 }, n, RngSeed(1)).expect("valid copula")
}
