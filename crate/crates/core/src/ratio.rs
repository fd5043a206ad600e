//! Exact statistics of `Z = Π γ₁,ℓ / Π γ₂,ℓ` for independent squared F
//! factors.
//!
//! Each factor is `(γ̄/m)(m_s-1) · G_m / G_{m_s}` with unit-scale gamma
//! variates `G`, so `Z = C · W` where
//!
//! ```text
//! C = γ̄₁ A₂ / (γ̄₂ A₁),      W = Π G_a / Π G_b,
//! a = Δ₁ ∪ E₂,  b = E₁ ∪ Δ₂,   E[W^t] = Π Γ(a+t)/Γ(a) · Π Γ(b-t)/Γ(b).
//! ```
//!
//! Inverting that Mellin transform gives every statistic as one
//! [`GammaRatioKernel`]; [`RatioSpec::kernel`] is the only place that builds
//! them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fisher::FisherFParams;
use crate::mellin::{ArgumentSign, ContourPolicy, GammaRatioKernel};
use crate::specfun::{gauss_2f1, ln_gamma, log_beta};

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSpec {
    pub numerator: Vec<FisherFParams>,
    pub denominator: Vec<FisherFParams>,
}

/// Which distribution function a kernel represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// `z f_Z(z)` as a function of `x = C/z`
    Pdf,
    /// `F_Z(z)` as a function of `x = C/z`
    Cdf,
    /// `E[e^{-sZ}]` as a function of `x = sC`
    Mgf,
}

fn product(v: &[FisherFParams], f: impl Fn(&FisherFParams) -> f64) -> f64 {
    v.iter().map(f).product()
}

fn log_b(v: &[FisherFParams]) -> f64 {
    v.iter().map(|p| ln_gamma(p.m) + ln_gamma(p.m_s)).sum()
}

impl RatioSpec {
    pub fn new(numerator: Vec<FisherFParams>, denominator: Vec<FisherFParams>) -> Result<Self> {
        let spec = Self { numerator, denominator };
        spec.validate()?;
        Ok(spec)
    }

    /// Product of independent factors (no denominator).
    pub fn product(factors: Vec<FisherFParams>) -> Result<Self> {
        Self::new(factors, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.numerator.is_empty() {
            return Err(Error::Empty("numerator factor list"));
        }
        for p in self.numerator.iter().chain(&self.denominator) {
            p.validate()?;
        }
        Ok(())
    }

    pub fn a1(&self) -> f64 {
        product(&self.numerator, |p| p.m / (p.m_s - 1.0))
    }

    pub fn a2(&self) -> f64 {
        product(&self.denominator, |p| p.m / (p.m_s - 1.0))
    }

    /// `ln Π Γ(m)Γ(m_s)` over the numerator.
    pub fn log_b1(&self) -> f64 {
        log_b(&self.numerator)
    }

    pub fn log_b2(&self) -> f64 {
        log_b(&self.denominator)
    }

    pub fn gamma_bar1(&self) -> f64 {
        product(&self.numerator, |p| p.gamma_bar)
    }

    pub fn gamma_bar2(&self) -> f64 {
        product(&self.denominator, |p| p.gamma_bar)
    }

    pub fn delta1(&self) -> Vec<f64> {
        self.numerator.iter().map(|p| p.m).collect()
    }

    pub fn delta2(&self) -> Vec<f64> {
        self.denominator.iter().map(|p| p.m).collect()
    }

    pub fn e1(&self) -> Vec<f64> {
        self.numerator.iter().map(|p| p.m_s).collect()
    }

    pub fn e2(&self) -> Vec<f64> {
        self.denominator.iter().map(|p| p.m_s).collect()
    }

    /// `C = γ̄₁A₂/(γ̄₂A₁)`.
    pub fn scale(&self) -> f64 {
        self.gamma_bar1() * self.a2() / (self.gamma_bar2() * self.a1())
    }

    /// Every numerator mean SNR multiplied by `k^{1/L₁}`, so `Z` scales by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let per = k.powf(1.0 / self.numerator.len() as f64);
        Self {
            numerator: self.numerator.iter().map(|p| p.scaled(per)).collect(),
            denominator: self.denominator.clone(),
        }
    }

    /// Shape parameters `(a, b)` of `W`.
    fn shapes(&self) -> (Vec<f64>, Vec<f64>) {
        let mut a = self.delta1();
        a.extend(self.e2());
        let mut b = self.e1();
        b.extend(self.delta2());
        (a, b)
    }

    pub fn kernel(&self, statistic: Statistic) -> GammaRatioKernel {
        let (a, b) = self.shapes();
        let log_prefactor = -self.log_b1() - self.log_b2();
        match statistic {
            Statistic::Pdf => GammaRatioKernel::new(a, b).with_log_prefactor(log_prefactor),
            Statistic::Cdf => GammaRatioKernel::new(a, b)
                .with_cdf_factor(true)
                .with_log_prefactor(log_prefactor),
            Statistic::Mgf => {
                let mut plus = b;
                plus.push(0.0);
                GammaRatioKernel::new(plus, a)
                    .with_log_prefactor(log_prefactor)
                    .with_argument_sign(ArgumentSign::Negative)
            }
        }
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        check_positive("z", z)?;
        let x = self.scale() / z;
        let kernel = self.kernel(Statistic::Pdf);
        let value = kernel.eval_contour(x, &policy())?;
        if value > f64::MIN_POSITIVE {
            return Ok(value / z);
        }
        // far left tail: the dominant residue is accurate where the line
        // integral has underflowed
        if x > 1.0 {
            let lead = kernel.leading_term(x)?;
            return Ok(lead.value.max(0.0) / z);
        }
        Ok(0.0)
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(0.0);
        }
        check_positive("z", z)?;
        if z.is_infinite() {
            return Ok(1.0);
        }
        let x = self.scale() / z;
        let kernel = self.kernel(Statistic::Cdf);
        let value = kernel.eval_contour(x, &policy())?;
        if value <= f64::MIN_POSITIVE && x > 1.0 {
            return Ok(kernel.leading_term(x)?.value.clamp(0.0, 1.0));
        }
        Ok(value.clamp(0.0, 1.0))
    }

    /// `E[e^{-sZ}]`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        check_positive("s", s)?;
        let value = self.kernel(Statistic::Mgf).eval_contour(s * self.scale(), &policy())?;
        Ok(value.clamp(0.0, 1.0))
    }

    /// Dominant-residue approximation of the CDF for small `z` (high SNR)
    /// and its diversity exponent.
    pub fn asymptotic_cdf(&self, z: f64) -> Result<(f64, f64)> {
        check_positive("z", z)?;
        let lead = self.kernel(Statistic::Cdf).leading_term(self.scale() / z)?;
        Ok((lead.value, lead.exponent))
    }

    /// Smallest `z` with `F_Z(z) >= p`, by bisection on `ln z`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                reason: "quantile level must lie in (0, 1)",
            });
        }
        let centre = self.scale().ln();
        let mut lo = centre - 1.0;
        let mut hi = centre + 1.0;
        let mut expansions = 0;
        while self.cdf(lo.exp())? > p {
            lo -= 2.0 * (centre - lo);
            expansions += 1;
            if expansions > 12 {
                return Err(Error::NonConvergence {
                    what: "quantile bracket",
                    iterations: expansions,
                });
            }
        }
        while self.cdf(hi.exp())? < p {
            hi += 2.0 * (hi - centre);
            expansions += 1;
            if expansions > 12 {
                return Err(Error::NonConvergence {
                    what: "quantile bracket",
                    iterations: expansions,
                });
            }
        }
        for _ in 0..200 {
            if hi - lo < 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid.exp())? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let num: f64 = self.numerator.iter().map(|p| p.sample(rng)).product();
        let den: f64 = self.denominator.iter().map(|p| p.sample(rng)).product();
        num / den
    }
}

fn policy() -> ContourPolicy {
    ContourPolicy::saddle()
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: v,
            reason: "argument must be positive",
        })
    }
}

pub fn pdf_z(spec: &RatioSpec, z: f64) -> Result<f64> {
    spec.pdf(z)
}

pub fn cdf_z(spec: &RatioSpec, z: f64) -> Result<f64> {
    spec.cdf(z)
}

pub fn mgf_z(spec: &RatioSpec, s: f64) -> Result<f64> {
    spec.mgf(s)
}

pub fn sample_z<R: Rng + ?Sized>(spec: &RatioSpec, rng: &mut R) -> f64 {
    spec.sample(rng)
}

/// CDF of `Π γ_ℓ`.
pub fn cdf_product(factors: &[FisherFParams], z: f64) -> Result<f64> {
    RatioSpec::product(factors.to_vec())?.cdf(z)
}

/// `m₁(m_{s2}-1)γ̄₂ / (m₂(m_{s1}-1)γ̄₁)`, the reciprocal scale of `γ₁/γ₂`.
fn kappa(p1: &FisherFParams, p2: &FisherFParams) -> f64 {
    p1.m * (p2.m_s - 1.0) * p2.gamma_bar / (p2.m * (p1.m_s - 1.0) * p1.gamma_bar)
}

/// Density of `γ₁/γ₂` in closed form through `2F1`.
pub fn pdf_ratio2(p1: &FisherFParams, p2: &FisherFParams, x: f64) -> Result<f64> {
    p1.validate()?;
    p2.validate()?;
    check_positive("x", x)?;
    let k = kappa(p1, p2);
    let (m1, ms1, m2, ms2) = (p1.m, p1.m_s, p2.m, p2.m_s);
    let log = log_beta(m1 + m2, ms1 + ms2)? - log_beta(m1, ms1)? - log_beta(m2, ms2)?
        + (m1 - 1.0) * x.ln()
        + m1 * k.ln();
    let h = gauss_2f1(m1 + ms1, m1 + m2, m1 + ms1 + m2 + ms2, 1.0 - k * x)?;
    Ok(log.exp() * h)
}

fn log_gamma_product(p1: &FisherFParams, p2: &FisherFParams) -> f64 {
    ln_gamma(p1.m) + ln_gamma(p1.m_s) + ln_gamma(p2.m) + ln_gamma(p2.m_s)
}

/// CDF of `γ₁/γ₂` from the parameter-shifted `G^{3,2}_{3,3}` form.
pub fn cdf_ratio2(p1: &FisherFParams, p2: &FisherFParams, x: f64) -> Result<f64> {
    p1.validate()?;
    p2.validate()?;
    check_positive("x", x)?;
    let k = kappa(p1, p2);
    let m1 = p1.m;
    let kernel = GammaRatioKernel::meijer_g(
        3,
        2,
        &[1.0, 1.0 - p2.m_s + m1, m1 + 1.0],
        &[m1, m1 + p1.m_s, m1 + p2.m],
    )
    .with_log_prefactor(m1 * (k * x).ln() - log_gamma_product(p1, p2));
    Ok(kernel.eval_contour(1.0 / (k * x), &policy())?.clamp(0.0, 1.0))
}

/// `E[e^{-s γ₁/γ₂}]` from the parameter-shifted `G^{2,3}_{3,2}` form.
pub fn mgf_ratio2(p1: &FisherFParams, p2: &FisherFParams, s: f64) -> Result<f64> {
    p1.validate()?;
    p2.validate()?;
    if s == 0.0 {
        return Ok(1.0);
    }
    check_positive("s", s)?;
    let k = kappa(p1, p2);
    let m1 = p1.m;
    let kernel = GammaRatioKernel::meijer_g(
        2,
        3,
        &[1.0 - m1 - p1.m_s, 1.0 - m1 - p2.m, 1.0 - m1],
        &[0.0, p2.m_s - m1],
    )
    .with_log_prefactor(m1 * (k / s).ln() - log_gamma_product(p1, p2));
    Ok(kernel.eval_contour(k / s, &policy())?.clamp(0.0, 1.0))
}
