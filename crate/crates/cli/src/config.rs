//! Scenario documents.
//!
//! A scenario is a TOML file:
//!
//! ```toml
//! mode = "cdf"
//!
//! [[numerator]]
//! gamma_bar_db = 1.0
//! m = 5.0
//! m_s = 10.0
//! count = 2
//!
//! [[denominator]]
//! gamma_bar_db = 1.0
//! m = 5.0
//! m_s = 10.0
//! count = 2
//!
//! [sweep]
//! variable = "x"
//! start = 0.05
//! stop = 20.0
//! points = 20
//! spacing = "log"
//!
//! [mc]
//! n = 100000
//! seed = 1
//!
//! [fit]
//! epsilon = "tuned"
//! ```
//!
//! Factor tables are `numerator`/`denominator` for the distribution modes,
//! `D`/`E` for secrecy and `AR`/`RB`/`RR` for relay.

use std::path::PathBuf;

use serde::Deserialize;

use fratio::fisher::FisherFParams;
use fratio::lognormal::{fit_ratio_of_products, Adjustment};
use fratio::ratio::RatioSpec;
use fratio::wireless::{RelayConfig, SecrecyConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pdf,
    Cdf,
    Mgf,
    Fit,
    KsTest,
    Secrecy,
    Relay,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Pdf,
        Mode::Cdf,
        Mode::Mgf,
        Mode::Fit,
        Mode::KsTest,
        Mode::Secrecy,
        Mode::Relay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Pdf => "pdf",
            Mode::Cdf => "cdf",
            Mode::Mgf => "mgf",
            Mode::Fit => "fit",
            Mode::KsTest => "kstest",
            Mode::Secrecy => "secrecy",
            Mode::Relay => "relay",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Name of the sweep variable, or `None` for modes without a sweep.
    pub fn sweep_variable(self) -> Option<&'static str> {
        match self {
            Mode::Pdf | Mode::Cdf | Mode::Fit => Some("x"),
            Mode::Mgf => Some("s"),
            Mode::Secrecy => Some("gammaD_db"),
            Mode::Relay => Some("gammaAR_db"),
            Mode::KsTest => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
    /// uniform in dB between `start` and `stop` (given in dB), converted to linear
    Db,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let t = |i: usize| i as f64 / (n - 1) as f64;
        (0..n)
            .map(|i| match self.spacing {
                Spacing::Linear => self.start + (self.stop - self.start) * t(i),
                Spacing::Log => self.start * (self.stop / self.start).powf(t(i)),
                Spacing::Db => {
                    let db = self.start + (self.stop - self.start) * t(i);
                    if self.variable.ends_with("_db") {
                        db
                    } else {
                        10f64.powf(db / 10.0)
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMode {
    Zero,
    Fixed(f64),
    Tuned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuneOn {
    Exact,
    Samples,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSettings {
    pub epsilon: EpsilonMode,
    pub tune_on: TuneOn,
}

impl FitSettings {
    /// Fixed adjustment, if any. `zero` and `fixed` share one scheme with tuning.
    pub fn fixed_adjustment(&self) -> Option<Adjustment> {
        match self.epsilon {
            EpsilonMode::Zero => Some(Adjustment::Shared(0.0)),
            EpsilonMode::Fixed(e) => Some(Adjustment::Shared(e)),
            EpsilonMode::Tuned => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsSettings {
    pub samples: usize,
    pub repetitions: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Ratio(RatioSpec),
    Secrecy(SecrecyConfig),
    Relay(RelayConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub model: Model,
    pub sweep: Option<Sweep>,
    pub mc: McSettings,
    pub fit: Option<FitSettings>,
    pub ks: KsSettings,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;
pub const DEFAULT_KS_REPETITIONS: usize = 20;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    gamma_bar_db: f64,
    m: f64,
    m_s: f64,
    #[serde(default = "one")]
    count: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    start: f64,
    stop: f64,
    points: usize,
    #[serde(default = "linear")]
    spacing: String,
}

fn linear() -> String {
    "linear".into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    n: Option<u64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    epsilon: String,
    value: Option<f64>,
    tune_on: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKs {
    samples: Option<usize>,
    repetitions: Option<usize>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSecrecy {
    rate_threshold: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelay {
    rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: String,
    numerator: Option<Vec<RawFactor>>,
    denominator: Option<Vec<RawFactor>>,
    #[serde(rename = "D")]
    d: Option<Vec<RawFactor>>,
    #[serde(rename = "E")]
    e: Option<Vec<RawFactor>>,
    #[serde(rename = "AR")]
    ar: Option<Vec<RawFactor>>,
    #[serde(rename = "RB")]
    rb: Option<Vec<RawFactor>>,
    #[serde(rename = "RR")]
    rr: Option<RawFactor>,
    sweep: Option<RawSweep>,
    mc: Option<RawMc>,
    fit: Option<RawFit>,
    ks: Option<RawKs>,
    secrecy: Option<RawSecrecy>,
    relay: Option<RawRelay>,
    output: Option<RawOutput>,
}

fn factor(key: &str, raw: &RawFactor) -> Result<FisherFParams, CliError> {
    let bad = |field: &str, value: f64, rule: &str| Err(CliError::config(format!("{key}.{field} = {value}: {rule}")));
    if !raw.gamma_bar_db.is_finite() {
        return bad("gamma_bar_db", raw.gamma_bar_db, "gamma_bar_db must be finite");
    }
    if !(raw.m > 0.5 && raw.m.is_finite()) {
        return bad("m", raw.m, "m must exceed 0.5");
    }
    if !(raw.m_s > 1.0 && raw.m_s.is_finite()) {
        return bad("m_s", raw.m_s, "m_s must exceed 1");
    }
    if raw.count == 0 {
        return bad("count", 0.0, "count must be at least 1");
    }
    FisherFParams::from_db(raw.gamma_bar_db, raw.m, raw.m_s).map_err(|e| CliError::config(format!("{key}: {e}")))
}

fn cascade(key: &str, raw: &Option<Vec<RawFactor>>) -> Result<Vec<FisherFParams>, CliError> {
    let tables = raw
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| CliError::config(format!("missing [[{key}]] factor table")))?;
    let mut out = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        let p = factor(&format!("{key}[{i}]"), t)?;
        out.extend(std::iter::repeat_n(p, t.count));
    }
    Ok(out)
}

fn forbid<T>(present: &Option<T>, key: &str, mode: Mode) -> Result<(), CliError> {
    match present {
        Some(_) => Err(CliError::config(format!("[{key}] is not used in {} mode", mode.name()))),
        None => Ok(()),
    }
}

fn sweep(raw: &Option<RawSweep>, mode: Mode) -> Result<Option<Sweep>, CliError> {
    let Some(expected) = mode.sweep_variable() else {
        forbid(raw, "sweep", mode)?;
        return Ok(None);
    };
    let raw = raw
        .as_ref()
        .ok_or_else(|| CliError::config(format!("missing [sweep] section (variable = \"{expected}\")")))?;
    if raw.variable != expected {
        return Err(CliError::config(format!(
            "sweep.variable = \"{}\": {} mode sweeps \"{expected}\"",
            raw.variable,
            mode.name()
        )));
    }
    if raw.points < 2 {
        return Err(CliError::config(format!("sweep.points = {}: points must be at least 2", raw.points)));
    }
    if !(raw.start.is_finite() && raw.stop.is_finite()) {
        return Err(CliError::config("sweep.start and sweep.stop must be finite"));
    }
    let spacing = match raw.spacing.as_str() {
        "linear" => Spacing::Linear,
        "log" => Spacing::Log,
        "db" => Spacing::Db,
        other => {
            return Err(CliError::config(format!(
                "sweep.spacing = \"{other}\": spacing must be linear, log or db"
            )))
        }
    };
    let in_db = expected.ends_with("_db");
    if spacing == Spacing::Log && (in_db || !(raw.start > 0.0 && raw.stop > 0.0)) {
        return Err(CliError::config(
            "sweep.spacing = \"log\": log spacing needs a positive linear-scale variable",
        ));
    }
    let s = Sweep {
        variable: raw.variable.clone(),
        start: raw.start,
        stop: raw.stop,
        points: raw.points,
        spacing,
    };
    if !in_db {
        let lowest = s.values().into_iter().fold(f64::INFINITY, f64::min);
        let ok = if mode == Mode::Mgf { lowest >= 0.0 } else { lowest > 0.0 };
        if !ok {
            return Err(CliError::config(format!(
                "sweep: {} must be {} at every point",
                raw.variable,
                if mode == Mode::Mgf { "non-negative" } else { "positive" }
            )));
        }
    }
    Ok(Some(s))
}

fn fit_settings(raw: &Option<RawFit>, mode: Mode) -> Result<Option<FitSettings>, CliError> {
    let Some(raw) = raw else {
        // fit and kstest always fit; tuning is the default there
        return Ok(matches!(mode, Mode::Fit | Mode::KsTest).then_some(FitSettings {
            epsilon: EpsilonMode::Tuned,
            tune_on: TuneOn::Exact,
        }));
    };
    let epsilon = match (raw.epsilon.as_str(), raw.value) {
        ("zero", None) => EpsilonMode::Zero,
        ("tuned", None) => EpsilonMode::Tuned,
        ("fixed", Some(v)) if v.is_finite() => EpsilonMode::Fixed(v),
        ("fixed", _) => return Err(CliError::config("fit.value: epsilon = \"fixed\" needs a finite value")),
        ("zero" | "tuned", Some(_)) => {
            return Err(CliError::config("fit.value is only used with epsilon = \"fixed\""))
        }
        (other, _) => {
            return Err(CliError::config(format!(
                "fit.epsilon = \"{other}\": epsilon must be zero, fixed or tuned"
            )))
        }
    };
    let tune_on = match raw.tune_on.as_deref() {
        None | Some("exact") => TuneOn::Exact,
        Some("samples") if mode == Mode::KsTest && epsilon == EpsilonMode::Tuned => TuneOn::Samples,
        Some("samples") => {
            return Err(CliError::config(
                "fit.tune_on = \"samples\" is only available for tuned epsilon in kstest mode",
            ))
        }
        Some(other) => {
            return Err(CliError::config(format!(
                "fit.tune_on = \"{other}\": tune_on must be exact or samples"
            )))
        }
    };
    Ok(Some(FitSettings { epsilon, tune_on }))
}

/// Checks that a log-normal fit of `spec` is defined under `fit`.
fn check_fit(spec: &RatioSpec, fit: &Option<FitSettings>, what: &str) -> Result<(), CliError> {
    let Some(fit) = fit else { return Ok(()) };
    let adjustment = fit.fixed_adjustment().unwrap_or(Adjustment::Shared(0.0));
    fit_ratio_of_products(spec, adjustment)
        .map(|_| ())
        .map_err(|e| CliError::config(format!("[fit] on {what}: {e}")))
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end().to_string()))?;
    let mode = Mode::parse(&raw.mode).ok_or_else(|| {
        CliError::config(format!(
            "mode = \"{}\": mode must be one of pdf, cdf, mgf, fit, kstest, secrecy, relay",
            raw.mode
        ))
    })?;

    let sweep = sweep(&raw.sweep, mode)?;
    let fit = fit_settings(&raw.fit, mode)?;

    let mc_raw = raw.mc.unwrap_or_default();
    let mc = McSettings {
        n: mc_raw.n.unwrap_or(DEFAULT_MC_SAMPLES),
        seed: mc_raw.seed.unwrap_or(DEFAULT_SEED),
    };

    if mode != Mode::KsTest {
        forbid(&raw.ks, "ks", mode)?;
    }
    let ks_raw = raw.ks.unwrap_or_default();
    let ks = KsSettings {
        samples: ks_raw.samples.unwrap_or(fratio::gof::DEFAULT_SAMPLE_SIZE),
        repetitions: ks_raw.repetitions.unwrap_or(DEFAULT_KS_REPETITIONS),
        alpha: ks_raw.alpha.unwrap_or(DEFAULT_ALPHA),
    };
    if ks.samples == 0 {
        return Err(CliError::config("ks.samples must be at least 1"));
    }
    if ks.repetitions == 0 {
        return Err(CliError::config("ks.repetitions must be at least 1"));
    }
    check_alpha(ks.alpha)?;

    let model = match mode {
        Mode::Secrecy => {
            forbid(&raw.relay, "relay", mode)?;
            let rate = raw
                .secrecy
                .ok_or_else(|| CliError::config("missing [secrecy] section (rate_threshold)"))?
                .rate_threshold;
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(CliError::config(format!(
                    "secrecy.rate_threshold = {rate}: rate_threshold must be finite and non-negative"
                )));
            }
            let cfg = SecrecyConfig {
                legit: cascade("D", &raw.d)?,
                eaves: cascade("E", &raw.e)?,
                rate_threshold: rate,
            };
            let spec = cfg.ratio().map_err(invalid)?;
            check_fit(&spec, &fit, "D/E")?;
            Model::Secrecy(cfg)
        }
        Mode::Relay => {
            forbid(&raw.secrecy, "secrecy", mode)?;
            let rate = raw
                .relay
                .ok_or_else(|| CliError::config("missing [relay] section (rate)"))?
                .rate;
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(CliError::config(format!("relay.rate = {rate}: rate must be finite and non-negative")));
            }
            let rr = raw.rr.as_ref().ok_or_else(|| CliError::config("missing [RR] factor table"))?;
            if rr.count != 1 {
                return Err(CliError::config("RR.count: self-interference is a single factor"));
            }
            let cfg = RelayConfig {
                first_hop: cascade("AR", &raw.ar)?,
                second_hop: cascade("RB", &raw.rb)?,
                self_interference: factor("RR", rr)?,
                rate,
            };
            check_fit(&cfg.first_hop_spec().map_err(invalid)?, &fit, "AR/RR")?;
            Model::Relay(cfg)
        }
        _ => {
            forbid(&raw.secrecy, "secrecy", mode)?;
            forbid(&raw.relay, "relay", mode)?;
            let numerator = cascade("numerator", &raw.numerator)?;
            let denominator = match &raw.denominator {
                Some(_) => cascade("denominator", &raw.denominator)?,
                None => Vec::new(),
            };
            let spec = RatioSpec::new(numerator, denominator).map_err(invalid)?;
            check_fit(&spec, &fit, "numerator/denominator")?;
            Model::Ratio(spec)
        }
    };
    let stray = match mode {
        Mode::Secrecy => [("numerator", raw.numerator.is_some()), ("denominator", raw.denominator.is_some()), ("AR", raw.ar.is_some()), ("RB", raw.rb.is_some()), ("RR", raw.rr.is_some())],
        Mode::Relay => [("numerator", raw.numerator.is_some()), ("denominator", raw.denominator.is_some()), ("D", raw.d.is_some()), ("E", raw.e.is_some()), ("RR", false)],
        _ => [("D", raw.d.is_some()), ("E", raw.e.is_some()), ("AR", raw.ar.is_some()), ("RB", raw.rb.is_some()), ("RR", raw.rr.is_some())],
    };
    if let Some((key, _)) = stray.iter().find(|(_, present)| *present) {
        return Err(CliError::config(format!("[{key}] factors are not used in {} mode", mode.name())));
    }

    Ok(ScenarioConfig {
        mode,
        model,
        sweep,
        mc,
        fit,
        ks,
        output: raw.output.map(|o| o.path),
    })
}

fn invalid(e: fratio::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!("alpha = {alpha}: alpha must lie in (0, 1)")))
    }
}
