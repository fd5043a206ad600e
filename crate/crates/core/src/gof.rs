//! Kolmogorov-Smirnov goodness of fit.

use crate::error::{Error, Result};

/// Default sample size of a test.
pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSReport {
    pub statistic: f64,
    pub critical: f64,
    pub sample_size: usize,
    pub alpha: f64,
    pub accepted: bool,
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("sample set"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}

/// `sup |F(x) - F̂(x)|`, evaluated on both sides of every jump.
pub fn ks_statistic<F>(samples: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    ks_statistic_sorted(EmpiricalCdf::new(samples)?.sorted(), cdf)
}

/// As [`ks_statistic`] for samples already in ascending order.
pub fn ks_statistic_sorted<F>(sorted: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if sorted.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let v = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        let above = (k + 1) as f64 / v - f;
        let below = f - k as f64 / v;
        sup = sup.max(above).max(below);
    }
    Ok(sup)
}

/// `sup |F̂_a - F̂_b|` between two empirical distribution functions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ea, eb) = (EmpiricalCdf::new(a)?, EmpiricalCdf::new(b)?);
    let sup = ea
        .sorted()
        .iter()
        .chain(eb.sorted())
        .map(|&x| (ea.eval(x) - eb.eval(x)).abs())
        .fold(0.0, f64::max);
    Ok(sup)
}

/// `T_max = sqrt(-ln(α/2) / (2v))`.
pub fn critical_value(alpha: f64, v: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            reason: "significance level must lie in (0, 1)",
        });
    }
    if v == 0 {
        return Err(Error::Domain {
            name: "v",
            value: 0.0,
            reason: "sample size must be at least 1",
        });
    }
    Ok((-(alpha / 2.0).ln() / (2.0 * v as f64)).sqrt())
}

pub fn ks_test<F>(samples: &[f64], cdf: F, alpha: f64) -> Result<KSReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let critical = critical_value(alpha, samples.len().max(1))?;
    let statistic = ks_statistic(samples, cdf)?;
    Ok(KSReport {
        statistic,
        critical,
        sample_size: samples.len(),
        alpha,
        accepted: statistic < critical,
    })
}
