//! Monte Carlo agreement between the copula samplers and their CDFs.

use gcor_core::copula::population_qfcor;
use gcor_core::{copula_cdf, mcor, qcor, qf_surface, sample_copula, CopulaSpec, RngSeed};

const N: usize = 100_000;

fn families() -> Vec<CopulaSpec> {
    vec![
        CopulaSpec::Independence,
        CopulaSpec::Comonotone,
        CopulaSpec::Countermonotone,
        CopulaSpec::Gaussian { r: 0.5 },
        CopulaSpec::Gaussian { r: -0.7 },
        CopulaSpec::StudentT { r: 0.3, nu: 4.0 },
        CopulaSpec::StudentT { r: 0.57, nu: 1.0 },
        CopulaSpec::Clayton { theta: 2.0 },
        CopulaSpec::Gumbel { theta: 2.0 },
        CopulaSpec::PerfectLocalMedian,
    ]
}

/// Kolmogorov distance of `values` from the uniform law on `[0, 1]`.
fn ks_uniform(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().map(|(i, &u)| (u - i as f64 / n).max((i + 1) as f64 / n - u)).fold(0.0, f64::max)
}

#[test]
fn margins_are_uniform() {
    let n = 20_000;
    let critical = 1.63 / (n as f64).sqrt();
    for (k, spec) in families().into_iter().enumerate() {
        let s = sample_copula(&spec, n, RngSeed(100 + k as u64)).unwrap();
        assert!(s.xs().iter().chain(s.ys()).all(|u| (0.0..=1.0).contains(u)));
        let (dx, dy) = (ks_uniform(s.xs()), ks_uniform(s.ys()));
        assert!(dx <= critical && dy <= critical, "{spec}: {dx} {dy} > {critical}");
    }
}

#[test]
fn empirical_copula_matches_cdf() {
    let levels = [0.1, 0.3, 0.5, 0.7, 0.9];
    for (k, spec) in families().into_iter().enumerate() {
        let s = sample_copula(&spec, N, RngSeed(7 + k as u64)).unwrap();
        for &u in &levels {
            for &v in &levels {
                let empirical = s.joint_cdf(u, v);
                let exact = copula_cdf(&spec, u, v).unwrap();
                assert!((empirical - exact).abs() <= 0.01, "{spec} at ({u},{v}): {empirical} vs {exact}");
            }
        }
    }
}

#[test]
fn clayton_median_correlation() {
    let spec = CopulaSpec::Clayton { theta: 2.0 };
    let s = sample_copula(&spec, N, RngSeed(2024)).unwrap();
    let r = qcor(&s, 0.5, 0.5).unwrap().correlation;
    let population = population_qfcor(&spec, 0.5, 0.5).unwrap();
    assert!((population - (4.0 / 7f64.sqrt() - 1.0)).abs() < 1e-12);
    assert!((r - 0.512).abs() <= 0.02, "{r}");
}

#[test]
fn independence_surface_is_flat() {
    let s = sample_copula(&CopulaSpec::Independence, N, RngSeed(3)).unwrap();
    let levels: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let surface = qf_surface(&s, &levels, false).unwrap();
    for (i, &a) in levels.iter().enumerate() {
        for (j, &b) in levels.iter().enumerate() {
            // four standard deviations of the empirical covariance
            let tol = 4.0 * (a * (1.0 - a) * b * (1.0 - b) / N as f64).sqrt();
            let v = surface.values[i][j];
            assert!(v.abs() <= tol, "({a},{b}): {v} > {tol}");
        }
    }
}

#[test]
fn perfect_local_median_is_not_comonotone() {
    let s = sample_copula(&CopulaSpec::PerfectLocalMedian, N, RngSeed(11)).unwrap();
    // the sample split at 1/2 is binomial, so qcor sits O(1/√n) below one
    let q = qcor(&s, 0.5, 0.5).unwrap().correlation;
    assert!(q > 0.97, "{q}");
    let m = mcor(&s).unwrap().correlation;
    // population Pearson correlation is exactly 1/2
    assert!((m - 0.5).abs() <= 0.02, "{m}");
}

#[test]
fn sampling_is_reproducible() {
    for spec in families() {
        let a = sample_copula(&spec, 500, RngSeed(42)).unwrap();
        let b = sample_copula(&spec, 500, RngSeed(42)).unwrap();
        let c = sample_copula(&spec, 500, RngSeed(43)).unwrap();
        assert_eq!(a, b);
        if !matches!(spec, CopulaSpec::Comonotone | CopulaSpec::Countermonotone | CopulaSpec::PerfectLocalMedian) {
            assert_ne!(a, c);
        }
    }
}
