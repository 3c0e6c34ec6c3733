//! Estimators and goodness-of-fit statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub count: usize,
}

impl Estimate {
    /// Sample mean and standard error of the mean.
    pub fn mean_of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { value: f64::NAN, se: f64::NAN, count: 0 };
        }
        let m = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 { (sample_variance(xs) / n as f64).sqrt() } else { f64::NAN };
        Self { value: m, se, count: n }
    }

    /// `(value − predicted) / se`.
    pub fn z_score(&self, predicted: f64) -> f64 {
        let d = self.value - predicted;
        if self.se.is_nan() {
            f64::NAN
        } else if self.se > 0.0 {
            d / self.se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(d)
        }
    }
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

/// Asymptotic one-sample KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Geometric law `P(g = k) = p(1−p)^k` on `k ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometric {
    pub p: f64,
}

impl Geometric {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!("geometric parameter {p} outside (0,1]")));
        }
        Ok(Self { p })
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.p * (1.0 - self.p).powi(k as i32)
    }

    pub fn cdf(&self, k: u64) -> f64 {
        1.0 - (1.0 - self.p).powi(k as i32 + 1)
    }

    /// Maximum-likelihood fit `p̂ = 1 / (1 + ḡ)` with its delta-method standard error.
    pub fn fit(samples: &[u64]) -> Result<Estimate> {
        if samples.is_empty() {
            return Err(Error::Statistical("no samples to fit".into()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<u64>() as f64 / n;
        let p = 1.0 / (1.0 + mean);
        // Fisher information n / (p²(1−p))
        let se = (p * p * (1.0 - p) / n).sqrt();
        Ok(Estimate { value: p, se, count: samples.len() })
    }
}

/// Counts of each value `0..=max`.
pub fn histogram(samples: &[u64]) -> Vec<u64> {
    let max = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0u64; max + 1];
    for &s in samples {
        h[s as usize] += 1;
    }
    h
}

/// KS distance `sup_k |F̂(k) − F(k)|` against a geometric law.
pub fn ks_geometric(samples: &[u64], law: &Geometric) -> f64 {
    let h = histogram(samples);
    let n = samples.len() as f64;
    let mut acc = 0u64;
    let mut d: f64 = 0.0;
    for (k, &c) in h.iter().enumerate() {
        acc += c;
        d = d.max((acc as f64 / n - law.cdf(k as u64)).abs());
    }
    d
}

/// Pearson chi-square test against a geometric law, merging the tail so every
/// bin expects at least 5 samples. Returns `(statistic, dof, p-value)`.
pub fn chi_square_geometric(samples: &[u64], law: &Geometric) -> Result<(f64, usize, f64)> {
    let n = samples.len() as f64;
    let h = histogram(samples);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut k = 0u64;
    let mut tail = 1.0;
    while n * law.pmf(k) >= 5.0 && n * (tail - law.pmf(k)) >= 5.0 {
        let obs = h.get(k as usize).copied().unwrap_or(0) as f64;
        bins.push((obs, n * law.pmf(k)));
        tail -= law.pmf(k);
        k += 1;
    }
    let rest: u64 = h.iter().skip(k as usize).sum();
    bins.push((rest as f64, n * tail));
    if bins.len() < 2 {
        return Err(Error::Statistical(format!("only {} samples, too few for chi-square", samples.len())));
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    // one parameter is fixed in advance, none fitted
    let dof = bins.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Statistical(e.to_string()))?;
    Ok((stat, dof, 1.0 - dist.cdf(stat)))
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

/// Total-variation distance `½ Σ |a − b|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
