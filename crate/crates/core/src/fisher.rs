//! The squared Fisher-Snedecor F variate.
//!
//! `γ = X₁/X₂` with `X₁ ~ Gamma(m, γ̄/m)` (multipath) and
//! `X₂ ~ Gamma(m_s, 1/(m_s-1))` (inverse shadowing), so `E[γ] = γ̄`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::specfun::{log_beta, reg_inc_beta, sample_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherFParams {
    /// mean SNR, linear scale
    pub gamma_bar: f64,
    pub m: f64,
    pub m_s: f64,
}

impl FisherFParams {
    pub fn new(gamma_bar: f64, m: f64, m_s: f64) -> Result<Self> {
        let p = Self { gamma_bar, m, m_s };
        p.validate()?;
        Ok(p)
    }

    /// Mean SNR given in dB.
    pub fn from_db(gamma_bar_db: f64, m: f64, m_s: f64) -> Result<Self> {
        Self::new(db_to_linear(gamma_bar_db), m, m_s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return Err(Error::Domain {
                name: "gamma_bar",
                value: self.gamma_bar,
                reason: "mean SNR must be positive and finite",
            });
        }
        if !(self.m > 0.5 && self.m.is_finite()) {
            return Err(Error::Domain {
                name: "m",
                value: self.m,
                reason: "fading parameter must exceed 1/2",
            });
        }
        if !(self.m_s > 1.0 && self.m_s.is_finite()) {
            return Err(Error::Domain {
                name: "m_s",
                value: self.m_s,
                reason: "shadowing parameter must exceed 1",
            });
        }
        Ok(())
    }

    /// Same fading, mean SNR multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            gamma_bar: self.gamma_bar * k,
            ..*self
        }
    }

    /// `(m_s - 1) γ̄ / m`, the scale of the variate.
    fn scale(&self) -> f64 {
        (self.m_s - 1.0) * self.gamma_bar / self.m
    }

    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        self.validate()?;
        check_nonnegative(gamma)?;
        let (m, ms) = (self.m, self.m_s);
        let w = (ms - 1.0) * self.gamma_bar;
        if gamma == 0.0 {
            return Ok(if m > 1.0 {
                0.0
            } else if m == 1.0 {
                ms / w
            } else {
                f64::INFINITY
            });
        }
        if gamma.is_infinite() {
            return Ok(0.0);
        }
        let log = m * m.ln() + ms * w.ln() + (m - 1.0) * gamma.ln()
            - log_beta(m, ms)?
            - (m + ms) * (m * gamma + w).ln();
        Ok(log.exp())
    }

    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        self.validate()?;
        check_nonnegative(gamma)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        if gamma.is_infinite() {
            return Ok(1.0);
        }
        let mg = self.m * gamma;
        let x = mg / (mg + (self.m_s - 1.0) * self.gamma_bar);
        reg_inc_beta(x, self.m, self.m_s)
    }

    /// `E[γⁿ]`; finite only for `n < m_s`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        self.validate()?;
        if f64::from(n) >= self.m_s {
            return Err(Error::DivergentMoment { order: n, m_s: self.m_s });
        }
        self.moment_real(f64::from(n))
    }

    /// `E[γ^p]` for real `p` in `(-m, m_s)`. Negative orders are needed for
    /// the reciprocal moments of denominator factors.
    pub fn moment_real(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if p == 0.0 {
            return Ok(1.0);
        }
        if !(p < self.m_s && p > -self.m) {
            return Err(Error::Domain {
                name: "moment order",
                value: p,
                reason: "moment order must lie in (-m, m_s)",
            });
        }
        let log = p * self.scale().ln() + log_beta(self.m + p, self.m_s - p)? - log_beta(self.m, self.m_s)?;
        Ok(log.exp())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x1 = sample_gamma(self.m, self.gamma_bar / self.m, rng);
        let x2 = sample_gamma(self.m_s, 1.0 / (self.m_s - 1.0), rng);
        x1 / x2
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_nonnegative(gamma: f64) -> Result<()> {
    if gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "gamma",
            value: gamma,
            reason: "SNR must be non-negative",
        })
    }
}
