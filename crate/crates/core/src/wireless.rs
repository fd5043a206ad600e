//! Secrecy and full-duplex relay performance over cascaded F fading.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fisher::FisherFParams;
use crate::montecarlo::{estimate_probability, McEstimate, RandomStream};
use crate::ratio::{cdf_product, RatioSpec};

/// Wiretap setting: legitimate cascade `γ_D = Πγ_D,ℓ`, eavesdropper cascade
/// `γ_E = Πγ_E,ℓ`, target secrecy rate `R_th` in bits/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyConfig {
    pub legit: Vec<FisherFParams>,
    pub eaves: Vec<FisherFParams>,
    pub rate_threshold: f64,
}

impl SecrecyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.legit.is_empty() {
            return Err(Error::Empty("legitimate cascade"));
        }
        if self.eaves.is_empty() {
            return Err(Error::Empty("eavesdropper cascade"));
        }
        if !(self.rate_threshold >= 0.0 && self.rate_threshold.is_finite()) {
            return Err(Error::Domain {
                name: "rate_threshold",
                value: self.rate_threshold,
                reason: "target secrecy rate must be finite and non-negative",
            });
        }
        Ok(())
    }

    /// `γ_D / γ_E`.
    pub fn ratio(&self) -> Result<RatioSpec> {
        self.validate()?;
        RatioSpec::new(self.legit.clone(), self.eaves.clone())
    }

    /// `τ = 2^{R_th}`.
    pub fn tau(&self) -> f64 {
        self.rate_threshold.exp2()
    }

    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let d: f64 = self.legit.iter().map(|p| p.sample(rng)).product();
        let e: f64 = self.eaves.iter().map(|p| p.sample(rng)).product();
        (d, e)
    }
}

/// `F_{γ_D/γ_E}(τ)`, a lower bound on the secrecy outage probability.
pub fn sop_lower_bound(cfg: &SecrecyConfig) -> Result<f64> {
    cfg.ratio()?.cdf(cfg.tau())
}

/// `Pr{(1+γ_D)/(1+γ_E) < τ}` by simulation.
pub fn sop_exact_mc(cfg: &SecrecyConfig, n: u64, rng: &mut RandomStream) -> Result<McEstimate> {
    cfg.validate()?;
    let tau = cfg.tau();
    Ok(estimate_probability(
        |r| cfg.sample_pair(r),
        |&(d, e)| (1.0 + d) < tau * (1.0 + e),
        n,
        rng,
    ))
}

/// `Pr{γ_D > γ_E}`; independent of the rate threshold.
pub fn pnsc(cfg: &SecrecyConfig) -> Result<f64> {
    Ok(1.0 - cfg.ratio()?.cdf(1.0)?)
}

/// Dominant-residue approximation of the SOP bound and its diversity order.
pub fn sop_asymptotic(cfg: &SecrecyConfig) -> Result<(f64, f64)> {
    asymptotic_cdf(&cfg.ratio()?, cfg.tau())
}

pub fn asymptotic_cdf(spec: &RatioSpec, z: f64) -> Result<(f64, f64)> {
    spec.asymptotic_cdf(z)
}

/// Interference-limited full-duplex decode-and-forward relay.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayConfig {
    /// source to relay cascade `γ_AR`
    pub first_hop: Vec<FisherFParams>,
    /// relay to destination cascade `γ_RB`
    pub second_hop: Vec<FisherFParams>,
    /// residual self-interference `γ_RR`
    pub self_interference: FisherFParams,
    /// rate `R` in bits/s/Hz
    pub rate: f64,
}

/// The two hop CDFs at `σ` and their combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayOutage {
    /// `F_Y(σ)`, `Y = γ_AR / γ_RR`
    pub first_hop: f64,
    /// `F_γ(σ)`, `γ = γ_RB`
    pub second_hop: f64,
    pub bound: f64,
}

impl RelayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.first_hop.is_empty() {
            return Err(Error::Empty("first hop cascade"));
        }
        if self.second_hop.is_empty() {
            return Err(Error::Empty("second hop cascade"));
        }
        self.self_interference.validate()?;
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::Domain {
                name: "rate",
                value: self.rate,
                reason: "rate must be finite and non-negative",
            });
        }
        Ok(())
    }

    /// `σ = 2^R - 1`.
    pub fn sigma(&self) -> f64 {
        self.rate.exp2() - 1.0
    }

    pub fn first_hop_spec(&self) -> Result<RatioSpec> {
        RatioSpec::new(self.first_hop.clone(), vec![self.self_interference])
    }
}

/// `F_Y(σ) + F_γ(σ) - F_Y(σ)F_γ(σ)`, i.e. the outage with `γ_RR + 1`
/// replaced by `γ_RR`. Dropping the `+1` can only raise the first-hop SINR,
/// so this sits at or below the true outage probability.
pub fn fd_outage_bound(cfg: &RelayConfig) -> Result<RelayOutage> {
    cfg.validate()?;
    let sigma = cfg.sigma();
    if sigma == 0.0 {
        return Ok(RelayOutage {
            first_hop: 0.0,
            second_hop: 0.0,
            bound: 0.0,
        });
    }
    let fy = cfg.first_hop_spec()?.cdf(sigma)?;
    let fg = cdf_product(&cfg.second_hop, sigma)?;
    Ok(RelayOutage {
        first_hop: fy,
        second_hop: fg,
        bound: fy + fg - fy * fg,
    })
}

/// `Pr{min(γ_AR/(γ_RR+1), γ_RB) < σ}` by simulation.
pub fn fd_outage_exact_mc(cfg: &RelayConfig, n: u64, rng: &mut RandomStream) -> Result<McEstimate> {
    cfg.validate()?;
    let sigma = cfg.sigma();
    Ok(estimate_probability(
        |r| {
            let ar: f64 = cfg.first_hop.iter().map(|p| p.sample(r)).product();
            let rr = cfg.self_interference.sample(r);
            let rb: f64 = cfg.second_hop.iter().map(|p| p.sample(r)).product();
            (ar / (rr + 1.0)).min(rb)
        },
        |&snr| snr < sigma,
        n,
        rng,
    ))
}
