//! Scenario execution.
//!
//! Sweep rows are computed in parallel and returned in sweep order. Monte
//! Carlo columns of the secrecy and relay modes draw from stream `row`; the
//! distribution modes share one sample set drawn from stream 0, and each
//! KS repetition uses stream `repetition`.

use rayon::prelude::*;

use fratio::fisher::FisherFParams;
use fratio::gof::{critical_value, ks_statistic_sorted};
use fratio::lognormal::{fit_ratio_of_products, tune_epsilon, Adjustment, CdfGrid, FitReport, TuneTarget};
use fratio::montecarlo::{estimate_cdf_curve, RandomStream};
use fratio::ratio::{cdf_product, RatioSpec};
use fratio::wireless::{
    fd_outage_bound, fd_outage_exact_mc, pnsc, sop_asymptotic, sop_exact_mc, sop_lower_bound, RelayConfig,
    SecrecyConfig,
};

use crate::config::{FitSettings, Mode, Model, ScenarioConfig, TuneOn};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// extra `#` lines placed after the provenance block
    pub notes: Vec<String>,
}

/// Column names of each mode.
pub fn columns(mode: Mode) -> Vec<&'static str> {
    match mode {
        Mode::Pdf => vec!["x", "exact_pdf", "lognormal_pdf"],
        Mode::Cdf => vec!["x", "exact_cdf", "lognormal_cdf", "mc_estimate", "mc_stderr"],
        Mode::Mgf => vec!["s", "exact_mgf", "mc_estimate", "mc_stderr"],
        Mode::Fit => vec!["x", "exact_cdf", "lognormal_cdf", "abs_error"],
        Mode::KsTest => vec!["repetition", "epsilon", "mu", "sigma", "statistic", "critical", "accepted"],
        Mode::Secrecy => vec![
            "gammaD_db",
            "sop_bound",
            "sop_mc",
            "sop_mc_stderr",
            "sop_asymptotic",
            "sop_lognormal",
            "pnsc",
        ],
        Mode::Relay => vec![
            "gammaAR_db",
            "first_hop_cdf",
            "second_hop_cdf",
            "op_bound",
            "op_mc",
            "op_mc_stderr",
            "op_lognormal",
        ],
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    match (&cfg.model, cfg.mode) {
        (Model::Ratio(spec), Mode::KsTest) => ks_command(cfg, spec),
        (Model::Ratio(spec), mode) => distribution(cfg, spec, mode),
        (Model::Secrecy(sc), _) => secrecy(cfg, sc),
        (Model::Relay(rc), _) => relay(cfg, rc),
    }
}

fn grid(cfg: &ScenarioConfig) -> Vec<f64> {
    cfg.sweep.as_ref().map(|s| s.values()).unwrap_or_default()
}

fn fit(spec: &RatioSpec, settings: &FitSettings) -> Result<FitReport, CliError> {
    Ok(match settings.fixed_adjustment() {
        Some(adjustment) => fit_ratio_of_products(spec, adjustment)?,
        None => {
            let grid = CdfGrid::from_spec(spec)?;
            tune_epsilon(spec, TuneTarget::Exact(&grid), None)?
        }
    })
}

fn epsilon_of(report: &FitReport) -> f64 {
    match &report.epsilon {
        Adjustment::Total(e) | Adjustment::Shared(e) => *e,
        Adjustment::PerFactor(es) => es.first().copied().unwrap_or(0.0),
    }
}

fn fit_note(report: &FitReport) -> String {
    let mut note = format!(
        "lognormal: mu={:.8e} sigma={:.8e} epsilon={:.8e}",
        report.params.mu,
        report.params.sigma,
        epsilon_of(report)
    );
    if let Some(d) = report.kolmogorov_distance {
        note.push_str(&format!(" kolmogorov_distance={d:.8e}"));
    }
    note
}

fn draws(spec: &RatioSpec, n: u64, rng: &mut RandomStream) -> Vec<f64> {
    (0..n).map(|_| spec.sample(rng)).collect()
}

fn distribution(cfg: &ScenarioConfig, spec: &RatioSpec, mode: Mode) -> Result<Table, CliError> {
    let xs = grid(cfg);
    let fitted = cfg.fit.as_ref().map(|f| fit(spec, f)).transpose()?;
    let notes = fitted.iter().map(fit_note).collect();
    let n = cfg.mc.n;
    let mut rng = RandomStream::new(cfg.mc.seed, 0);

    let rows: Vec<Vec<Cell>> = match mode {
        Mode::Pdf => xs
            .par_iter()
            .map(|&x| {
                let ln = match &fitted {
                    Some(f) => f.params.pdf(x)?,
                    None => f64::NAN,
                };
                Ok(vec![Cell::Num(x), Cell::Num(spec.pdf(x)?), Cell::Num(ln)])
            })
            .collect::<Result<_, CliError>>()?,
        Mode::Cdf => {
            let mc = if n > 0 {
                Some(estimate_cdf_curve(|r| spec.sample(r), &xs, n, &mut rng))
            } else {
                None
            };
            xs.par_iter()
                .enumerate()
                .map(|(i, &x)| {
                    let ln = match &fitted {
                        Some(f) => f.params.cdf(x)?,
                        None => f64::NAN,
                    };
                    let (v, s) = mc.as_ref().map_or((f64::NAN, f64::NAN), |m| (m[i].value, m[i].stderr));
                    Ok(vec![Cell::Num(x), Cell::Num(spec.cdf(x)?), Cell::Num(ln), Cell::Num(v), Cell::Num(s)])
                })
                .collect::<Result<_, CliError>>()?
        }
        Mode::Mgf => {
            let zs = draws(spec, n, &mut rng);
            xs.par_iter()
                .map(|&s| {
                    let (mean, stderr) = sample_mean(zs.iter().map(|z| (-s * z).exp()));
                    Ok(vec![Cell::Num(s), Cell::Num(spec.mgf(s)?), Cell::Num(mean), Cell::Num(stderr)])
                })
                .collect::<Result<_, CliError>>()?
        }
        Mode::Fit => {
            let f = fitted.as_ref().expect("fit mode always carries fit settings");
            xs.par_iter()
                .map(|&x| {
                    let exact = spec.cdf(x)?;
                    let ln = f.params.cdf(x)?;
                    Ok(vec![Cell::Num(x), Cell::Num(exact), Cell::Num(ln), Cell::Num((exact - ln).abs())])
                })
                .collect::<Result<_, CliError>>()?
        }
        Mode::KsTest | Mode::Secrecy | Mode::Relay => unreachable!("not a distribution mode"),
    };
    Ok(Table {
        columns: columns(mode),
        rows,
        notes,
    })
}

/// Mean and standard error; `NaN` for an empty sample.
fn sample_mean(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    match n {
        0 => (f64::NAN, f64::NAN),
        1 => (mean, f64::NAN),
        _ => (mean, (m2 / ((n - 1) as f64 * n as f64)).sqrt()),
    }
}

/// Tunes `ε` (or applies the fixed one), then runs one KS test per repetition.
pub fn ks_command(cfg: &ScenarioConfig, spec: &RatioSpec) -> Result<Table, CliError> {
    let settings = cfg.fit.expect("kstest mode always carries fit settings");
    let v = cfg.ks.samples;
    let critical = critical_value(cfg.ks.alpha, v)?;
    let shared = match settings.tune_on {
        TuneOn::Exact => Some(fit(spec, &settings)?),
        TuneOn::Samples => None,
    };
    let mut notes = Vec::new();
    if let Some(f) = &shared {
        notes.push(fit_note(f));
    }
    let rows = (0..cfg.ks.repetitions as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RandomStream::new(cfg.mc.seed, rep);
            let mut z = draws(spec, v as u64, &mut rng);
            z.sort_by(f64::total_cmp);
            let report = match &shared {
                Some(f) => f.clone(),
                None => tune_epsilon(spec, TuneTarget::Samples(&z), None)?,
            };
            let statistic = ks_statistic_sorted(&z, |x| report.params.cdf(x))?;
            Ok(vec![
                Cell::Int(rep),
                Cell::Num(epsilon_of(&report)),
                Cell::Num(report.params.mu),
                Cell::Num(report.params.sigma),
                Cell::Num(statistic),
                Cell::Num(critical),
                Cell::Bool(statistic < critical),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        columns: columns(Mode::KsTest),
        rows,
        notes,
    })
}

fn with_mean_db(factors: &[FisherFParams], db: f64) -> Result<Vec<FisherFParams>, CliError> {
    Ok(factors
        .iter()
        .map(|p| FisherFParams::from_db(db, p.m, p.m_s))
        .collect::<Result<_, _>>()?)
}

fn lognormal_cdf_at(spec: &RatioSpec, settings: &Option<FitSettings>, z: f64) -> Result<f64, CliError> {
    match settings {
        Some(s) => Ok(fit(spec, s)?.params.cdf(z)?),
        None => Ok(f64::NAN),
    }
}

fn secrecy(cfg: &ScenarioConfig, base: &SecrecyConfig) -> Result<Table, CliError> {
    let rows = grid(cfg)
        .par_iter()
        .enumerate()
        .map(|(row, &db)| {
            let sc = SecrecyConfig {
                legit: with_mean_db(&base.legit, db)?,
                ..base.clone()
            };
            let bound = sop_lower_bound(&sc)?;
            let (mc, stderr) = if cfg.mc.n > 0 {
                let est = sop_exact_mc(&sc, cfg.mc.n, &mut RandomStream::new(cfg.mc.seed, row as u64))?;
                (est.value, est.stderr)
            } else {
                (f64::NAN, f64::NAN)
            };
            let (asym, _) = sop_asymptotic(&sc)?;
            let ln = lognormal_cdf_at(&sc.ratio()?, &cfg.fit, sc.tau())?;
            Ok(vec![
                Cell::Num(db),
                Cell::Num(bound),
                Cell::Num(mc),
                Cell::Num(stderr),
                Cell::Num(asym),
                Cell::Num(ln),
                Cell::Num(pnsc(&sc)?),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        columns: columns(Mode::Secrecy),
        rows,
        notes: Vec::new(),
    })
}

fn relay(cfg: &ScenarioConfig, base: &RelayConfig) -> Result<Table, CliError> {
    let rows = grid(cfg)
        .par_iter()
        .enumerate()
        .map(|(row, &db)| {
            let rc = RelayConfig {
                first_hop: with_mean_db(&base.first_hop, db)?,
                ..base.clone()
            };
            let out = fd_outage_bound(&rc)?;
            let (mc, stderr) = if cfg.mc.n > 0 {
                let est = fd_outage_exact_mc(&rc, cfg.mc.n, &mut RandomStream::new(cfg.mc.seed, row as u64))?;
                (est.value, est.stderr)
            } else {
                (f64::NAN, f64::NAN)
            };
            let sigma = rc.sigma();
            let ln = if cfg.fit.is_none() {
                f64::NAN
            } else if sigma > 0.0 {
                let fy = lognormal_cdf_at(&rc.first_hop_spec()?, &cfg.fit, sigma)?;
                let fg = cdf_product(&rc.second_hop, sigma)?;
                fy + fg - fy * fg
            } else {
                0.0
            };
            Ok(vec![
                Cell::Num(db),
                Cell::Num(out.first_hop),
                Cell::Num(out.second_hop),
                Cell::Num(out.bound),
                Cell::Num(mc),
                Cell::Num(stderr),
                Cell::Num(ln),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        columns: columns(Mode::Relay),
        rows,
        notes: Vec::new(),
    })
}
