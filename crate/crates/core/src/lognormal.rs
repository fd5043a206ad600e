//! Moment-matched log-normal approximations.
//!
//! Every composite here is a product of independent factors `γ` or `1/γ`.
//! Each factor contributes `H = E[γ^{±1}]` and `Y = E[γ^{±2}] / H²`; the
//! fitted log-normal has `σ² = ln(Y_adj)` and `μ = ln ΠH - σ²/2`, where
//! `Y_adj` is `ΠY` reduced by an adjustment factor `ε`. The first moment is
//! preserved for every `ε`; with `ε = 0` the second is too.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::FisherFParams;
use crate::gof::ks_statistic_sorted;
use crate::ratio::RatioSpec;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Margin kept between the adjusted `Y` and 1.
pub const EPSILON_MARGIN: f64 = 1e-6;
pub const GRID_POINTS: usize = 200;
pub const GRID_QUANTILES: (f64, f64) = (1e-4, 1.0 - 1e-4);
pub const COARSE_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain {
                name: "sigma",
                value: sigma,
                reason: "log-normal sigma must be positive and finite",
            });
        }
        if !mu.is_finite() {
            return Err(Error::Domain {
                name: "mu",
                value: mu,
                reason: "log-normal mu must be finite",
            });
        }
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, y: f64) -> Result<f64> {
        check_support(y)?;
        let u = (y.ln() - self.mu) / self.sigma;
        Ok((-0.5 * u * u).exp() / (y * self.sigma * (2.0 * std::f64::consts::PI).sqrt()))
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        check_support(y)?;
        Ok(self.cdf_unchecked(y))
    }

    fn cdf_unchecked(&self, y: f64) -> f64 {
        0.5 * libm::erfc(-(y.ln() - self.mu) / (self.sigma * SQRT_2))
    }

    /// `E[Yⁿ] = exp(nμ + n²σ²/2)`.
    pub fn moment(&self, n: f64) -> f64 {
        (n * self.mu + 0.5 * n * n * self.sigma * self.sigma).exp()
    }
}

pub fn lognormal_pdf(p: &LogNormalParams, y: f64) -> Result<f64> {
    p.pdf(y)
}

pub fn lognormal_cdf(p: &LogNormalParams, y: f64) -> Result<f64> {
    p.cdf(y)
}

pub fn lognormal_moment(p: &LogNormalParams, n: f64) -> f64 {
    p.moment(n)
}

fn check_support(y: f64) -> Result<()> {
    if y > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "y",
            value: y,
            reason: "log-normal support is y > 0",
        })
    }
}

/// How `ε` enters the matched second-moment ratio.
#[derive(Debug, Clone, PartialEq)]
pub enum Adjustment {
    /// `ΠY - ε`
    Total(f64),
    /// `Π(Yᵢ - ε)`
    Shared(f64),
    /// `Π(Yᵢ - εᵢ)`, numerator factors first
    PerFactor(Vec<f64>),
}

impl Adjustment {
    fn apply(&self, ys: &[f64]) -> Result<f64> {
        let adjusted = match self {
            Adjustment::Total(e) => ys.iter().product::<f64>() - e,
            Adjustment::Shared(e) => positive_product(ys.iter().map(|y| y - e))?,
            Adjustment::PerFactor(es) => {
                if es.len() != ys.len() {
                    return Err(Error::Domain {
                        name: "epsilon count",
                        value: es.len() as f64,
                        reason: "one adjustment factor per composite factor is required",
                    });
                }
                positive_product(ys.iter().zip(es).map(|(y, e)| y - e))?
            }
        };
        if !(adjusted > 1.0) {
            return Err(Error::Domain {
                name: "adjusted Y",
                value: adjusted,
                reason: "Y - epsilon must exceed 1 for a positive sigma",
            });
        }
        Ok(adjusted)
    }
}

fn positive_product(terms: impl Iterator<Item = f64>) -> Result<f64> {
    let mut acc = 1.0;
    for t in terms {
        if !(t > 0.0) {
            return Err(Error::Domain {
                name: "Y_i - epsilon_i",
                value: t,
                reason: "every adjusted factor must stay positive",
            });
        }
        acc *= t;
    }
    Ok(acc)
}

/// Record of an adjustment-factor search.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningRecord {
    /// `"exact"` (grid of the exact CDF) or `"samples"` (KS against draws)
    pub target: &'static str,
    pub grid_points: usize,
    pub quantile_range: (f64, f64),
    pub coarse_points: usize,
    pub bounds: (f64, f64),
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub params: LogNormalParams,
    /// `ΠH`, the matched first moment
    pub matched_h: f64,
    /// `ΠY` before adjustment
    pub matched_y: f64,
    pub epsilon: Adjustment,
    pub kolmogorov_distance: Option<f64>,
    pub tuning: Option<TuningRecord>,
}

/// `(H, Y)` of a numerator factor.
fn numerator_terms(p: &FisherFParams) -> Result<(f64, f64)> {
    p.validate()?;
    if !(p.m_s > 2.0) {
        return Err(Error::Domain {
            name: "m_s",
            value: p.m_s,
            reason: "m_s must exceed 2 for log-normal fitting (second moment diverges)",
        });
    }
    let (m, ms) = (p.m, p.m_s);
    Ok((p.gamma_bar, (ms - 1.0) * (m + 1.0) / (m * (ms - 2.0))))
}

/// `(H, Y)` of a denominator factor, i.e. of `1/γ`.
fn denominator_terms(p: &FisherFParams) -> Result<(f64, f64)> {
    p.validate()?;
    if !(p.m > 2.0) {
        return Err(Error::Domain {
            name: "m",
            value: p.m,
            reason: "denominator m must exceed 2 for log-normal fitting (E[1/γ²] diverges)",
        });
    }
    let (m, ms) = (p.m, p.m_s);
    let h = ms * m / ((m - 1.0) * (ms - 1.0) * p.gamma_bar);
    Ok((h, (m - 1.0) * (ms + 1.0) / (ms * (m - 2.0))))
}

fn spec_terms(spec: &RatioSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let mut terms = Vec::with_capacity(spec.numerator.len() + spec.denominator.len());
    for p in &spec.numerator {
        terms.push(numerator_terms(p)?);
    }
    for p in &spec.denominator {
        terms.push(denominator_terms(p)?);
    }
    Ok(terms)
}

fn fit_terms(terms: &[(f64, f64)], epsilon: Adjustment) -> Result<FitReport> {
    let ys: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let log_h: f64 = terms.iter().map(|t| t.0.ln()).sum();
    let sigma2 = epsilon.apply(&ys)?.ln();
    Ok(FitReport {
        params: LogNormalParams::new(log_h - 0.5 * sigma2, sigma2.sqrt())?,
        matched_h: log_h.exp(),
        matched_y: ys.iter().product(),
        epsilon,
        kolmogorov_distance: None,
        tuning: None,
    })
}

pub fn fit_single(p: &FisherFParams, epsilon: f64) -> Result<FitReport> {
    fit_terms(&[numerator_terms(p)?], Adjustment::Total(epsilon))
}

pub fn fit_product(factors: &[FisherFParams], epsilons: &[f64]) -> Result<FitReport> {
    if factors.is_empty() {
        return Err(Error::Empty("factor list"));
    }
    let terms = factors.iter().map(numerator_terms).collect::<Result<Vec<_>>>()?;
    fit_terms(&terms, Adjustment::PerFactor(epsilons.to_vec()))
}

/// `X/Y`; `ε` is subtracted from the combined `Y_ratio`.
pub fn fit_ratio(px: &FisherFParams, py: &FisherFParams, epsilon: f64) -> Result<FitReport> {
    fit_terms(&[numerator_terms(px)?, denominator_terms(py)?], Adjustment::Total(epsilon))
}

pub fn fit_ratio_of_products(spec: &RatioSpec, epsilon: Adjustment) -> Result<FitReport> {
    fit_terms(&spec_terms(spec)?, epsilon)
}

/// Closed form for `L` i.i.d. factors over `L` i.i.d. factors, `ε`
/// subtracted once per numerator/denominator pair.
pub fn fit_iid_ratio(p: &FisherFParams, l: usize, epsilon: f64) -> Result<LogNormalParams> {
    if l == 0 {
        return Err(Error::Empty("factor list"));
    }
    let (_, y_num) = numerator_terms(p)?;
    let (_, y_den) = denominator_terms(p)?;
    let (m, ms) = (p.m, p.m_s);
    let pair = y_num * y_den - epsilon;
    if !(pair > 1.0) {
        return Err(Error::Domain {
            name: "adjusted Y",
            value: pair,
            reason: "Y - epsilon must exceed 1 for a positive sigma",
        });
    }
    let l = l as f64;
    let sigma2 = l * pair.ln();
    let mu = l * (ms * m / ((ms - 1.0) * (m - 1.0))).ln() - 0.5 * sigma2;
    LogNormalParams::new(mu, sigma2.sqrt())
}

/// Exact CDF tabulated on a log-spaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfGrid {
    pub z: Vec<f64>,
    pub f: Vec<f64>,
}

impl CdfGrid {
    /// `GRID_POINTS` log-spaced points between `lo` and `hi`.
    pub fn from_cdf<F>(cdf: F, lo: f64, hi: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Domain {
                name: "grid range",
                value: lo,
                reason: "grid needs 0 < lo < hi",
            });
        }
        let step = (hi / lo).ln() / (GRID_POINTS - 1) as f64;
        let z: Vec<f64> = (0..GRID_POINTS).map(|i| lo * (step * i as f64).exp()).collect();
        let f = z.par_iter().map(|&x| cdf(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { z, f })
    }

    /// Grid spanning the `GRID_QUANTILES` of the exact distribution.
    pub fn from_spec(spec: &RatioSpec) -> Result<Self> {
        let lo = spec.quantile(GRID_QUANTILES.0)?;
        let hi = spec.quantile(GRID_QUANTILES.1)?;
        Self::from_cdf(|z| spec.cdf(z), lo, hi)
    }

    pub fn distance(&self, p: &LogNormalParams) -> f64 {
        self.z
            .iter()
            .zip(&self.f)
            .map(|(&z, &f)| (f - p.cdf_unchecked(z)).abs())
            .fold(0.0, f64::max)
    }
}

/// What the Kolmogorov distance is measured against.
#[derive(Debug, Clone, Copy)]
pub enum TuneTarget<'a> {
    Exact(&'a CdfGrid),
    /// draws in ascending order
    Samples(&'a [f64]),
}

impl TuneTarget<'_> {
    fn distance(&self, p: &LogNormalParams) -> f64 {
        match self {
            TuneTarget::Exact(grid) => grid.distance(p),
            TuneTarget::Samples(sorted) => {
                ks_statistic_sorted(sorted, |x| Ok(p.cdf_unchecked(x))).unwrap_or(f64::INFINITY)
            }
        }
    }
}

/// Admissible shared `ε`: at least `-min Yᵢ`, and small enough that
/// `Π(Yᵢ - ε) >= 1 + EPSILON_MARGIN`.
pub fn shared_epsilon_bounds(ys: &[f64]) -> Result<(f64, f64)> {
    if ys.is_empty() {
        return Err(Error::Empty("factor list"));
    }
    let y_min = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = -y_min;
    let excess = |e: f64| ys.iter().map(|y| (y - e).ln()).sum::<f64>() - (1.0 + EPSILON_MARGIN).ln();
    if excess(lo) <= 0.0 {
        return Err(Error::InfeasibleBound { lo, hi: lo });
    }
    // excess decreases from positive at lo to -inf at y_min
    let (mut a, mut b) = (lo, y_min);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if excess(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((lo, a))
}

/// Shared `ε` minimizing the Kolmogorov distance to `target`: a coarse grid
/// over the admissible interval, refined by golden-section search around the
/// best grid point.
pub fn tune_epsilon(spec: &RatioSpec, target: TuneTarget<'_>, bounds: Option<(f64, f64)>) -> Result<FitReport> {
    let terms = spec_terms(spec)?;
    let ys: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let (lo, hi) = match bounds {
        Some(b) => b,
        None => shared_epsilon_bounds(&ys)?,
    };
    if !(lo < hi) {
        return Err(Error::InfeasibleBound { lo, hi });
    }
    let mut evaluations = 0usize;
    let mut objective = |e: f64| -> f64 {
        evaluations += 1;
        match fit_terms(&terms, Adjustment::Shared(e)) {
            Ok(fit) => target.distance(&fit.params),
            Err(_) => f64::INFINITY,
        }
    };

    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let coarse: Vec<(f64, f64)> = (0..COARSE_POINTS)
        .map(|i| {
            let e = lo + step * i as f64;
            (e, objective(e))
        })
        .collect();
    let k = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let mut best = coarse[k];

    let (mut a, mut b) = (coarse[k.saturating_sub(1)].0, coarse[(k + 1).min(COARSE_POINTS - 1)].0);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > 1e-9 * (hi - lo) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    for cand in [(c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    if lo <= 0.0 && 0.0 <= hi {
        let zero = objective(0.0);
        if zero <= best.1 {
            best = (0.0, zero);
        }
    }

    let mut report = fit_terms(&terms, Adjustment::Shared(best.0))?;
    report.kolmogorov_distance = Some(best.1);
    report.tuning = Some(TuningRecord {
        target: match target {
            TuneTarget::Exact(_) => "exact",
            TuneTarget::Samples(_) => "samples",
        },
        grid_points: match target {
            TuneTarget::Exact(grid) => grid.z.len(),
            TuneTarget::Samples(s) => s.len(),
        },
        quantile_range: GRID_QUANTILES,
        coarse_points: COARSE_POINTS,
        bounds: (lo, hi),
        evaluations,
    });
    Ok(report)
}
