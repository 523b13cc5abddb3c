//! Rational enumeration of the defining sums of the local, generalised and
//! summary covariances on small samples.

#![allow(dead_code)]

use gcor_core::BivariateSample;
use num_rational::Ratio;

pub type Q = Ratio<i64>;

pub const VALUES: [i64; 3] = [0, 1, 2];
pub const LEVELS: [i64; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9]; // tenths

/// Tolerance under which the QF summary covariance equals the rank-PIT
/// covariance on tie-free samples; the oracle shows the identity is exact
/// in rational arithmetic, so only rounding remains.
pub const QF_PIT_TOLERANCE: f64 = 1e-12;

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// All samples of length `n` whose coordinates come from `VALUES`.
pub fn samples(n: usize) -> impl Iterator<Item = (Vec<i64>, Vec<i64>)> {
    let k = VALUES.len();
    (0..k.pow(2 * n as u32)).map(move |mut code| {
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            xs.push(VALUES[code % k]);
            code /= k;
            ys.push(VALUES[code % k]);
            code /= k;
        }
        (xs, ys)
    })
}

pub fn permutations(n: usize) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n as i64 - 1);
            out.push(q);
        }
    }
    out
}

pub struct Oracle {
    pub xs: Vec<i64>,
    pub ys: Vec<i64>,
}

impl Oracle {
    pub fn n(&self) -> i64 {
        self.xs.len() as i64
    }

    pub fn cdf(values: &[i64], t: Q) -> Q {
        let count = values.iter().filter(|&&v| Q::from(v) <= t).count() as i64;
        Q::new(count, values.len() as i64)
    }

    pub fn joint(&self, a: Q, b: Q) -> Q {
        let count = self.xs.iter().zip(&self.ys).filter(|(&x, &y)| Q::from(x) <= a && Q::from(y) <= b).count() as i64;
        Q::new(count, self.n())
    }

    /// `inf{t : F̂(t) >= alpha}` by scanning the data values.
    pub fn quantile(values: &[i64], alpha: Q) -> Q {
        let mut sorted = values.to_vec();
        sorted.sort();
        sorted.into_iter().map(Q::from).find(|&t| Self::cdf(values, t) >= alpha).unwrap()
    }

    pub fn tcov(&self, a: Q, b: Q) -> Q {
        self.joint(a, b) - Self::cdf(&self.xs, a) * Self::cdf(&self.ys, b)
    }

    pub fn qcov(&self, alpha: Q, beta: Q) -> Q {
        self.tcov(Self::quantile(&self.xs, alpha), Self::quantile(&self.ys, beta))
    }

    pub fn quantile_errors(values: &[i64], alpha: Q) -> Vec<Q> {
        let q = Self::quantile(values, alpha);
        let u_star = Self::cdf(values, q);
        values.iter().map(|&v| u_star - if Q::from(v) <= q { Q::from(1) } else { Q::from(0) }).collect()
    }

    pub fn product_mean(a: &[Q], b: &[Q]) -> Q {
        a.iter().zip(b).fold(Q::from(0), |acc, (x, y)| acc + x * y) / Q::from(a.len() as i64)
    }

    pub fn coupling(a: &[Q], b: &[Q]) -> (Q, Q) {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort();
        b.sort();
        let upper = Self::product_mean(&a, &b);
        b.reverse();
        (Self::product_mean(&a, &b), upper)
    }

    pub fn covariance(&self) -> Q {
        let n = Q::from(self.n());
        let xs: Vec<Q> = self.xs.iter().map(|&v| Q::from(v)).collect();
        let ys: Vec<Q> = self.ys.iter().map(|&v| Q::from(v)).collect();
        let mx = xs.iter().fold(Q::from(0), |a, b| a + b) / n;
        let my = ys.iter().fold(Q::from(0), |a, b| a + b) / n;
        Self::product_mean(&xs, &ys) - mx * my
    }

    /// Sum of qcov over the level cells `((i-1)/n, i/n] × ((j-1)/n, j/n]`.
    pub fn qf_integral(&self) -> Q {
        let n = self.n();
        let mut total = Q::from(0);
        for i in 1..=n {
            for j in 1..=n {
                total += self.qcov(Q::new(i, n), Q::new(j, n));
            }
        }
        total / Q::from(n * n)
    }

    pub fn pit_covariance(&self) -> Q {
        let px: Vec<Q> = self.xs.iter().map(|&v| Self::cdf(&self.xs, Q::from(v))).collect();
        let py: Vec<Q> = self.ys.iter().map(|&v| Self::cdf(&self.ys, Q::from(v))).collect();
        let n = Q::from(self.n());
        let mx = px.iter().fold(Q::from(0), |a, b| a + b) / n;
        let my = py.iter().fold(Q::from(0), |a, b| a + b) / n;
        Self::product_mean(&px, &py) - mx * my
    }
}

pub fn library_sample(o: &Oracle) -> BivariateSample {
    BivariateSample::new(o.xs.iter().map(|&v| v as f64).collect(), o.ys.iter().map(|&v| v as f64).collect()).unwrap()
}
