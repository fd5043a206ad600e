use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fratio_cli::config::{check_alpha, Mode};
use fratio_cli::error::CliError;
use fratio_cli::output::{render_csv, Provenance};
use fratio_cli::scenario::Cell;
use fratio_cli::{parse_config, run_scenario};

/// Exact and approximate statistics of ratios of products of F variates.
///
/// Exit status: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
#[derive(Debug, Parser)]
#[command(name = "fratio", version)]
struct Args {
    /// pdf, cdf, mgf, fit, kstest, secrecy or relay; must match the config
    mode: String,
    /// scenario file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// overrides [mc].seed
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; overrides [output].path (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// overrides [mc].n
    #[arg(long)]
    mc_samples: Option<u64>,
    /// KS significance level; overrides [ks].alpha
    #[arg(long)]
    alpha: Option<f64>,
}

fn run(args: Args) -> Result<(), CliError> {
    let mode = Mode::parse(&args.mode)
        .ok_or_else(|| CliError::Config(format!("unknown mode \"{}\"", args.mode)))?;
    let text = fs::read(&args.config).map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let text_str = std::str::from_utf8(&text)
        .map_err(|_| CliError::Config(format!("{}: config is not UTF-8", args.config.display())))?;
    let mut cfg = parse_config(text_str).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", args.config.display())),
        other => other,
    })?;
    if cfg.mode != mode {
        return Err(CliError::Config(format!(
            "mode argument \"{}\" does not match config mode \"{}\"",
            mode.name(),
            cfg.mode.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = args.mc_samples {
        cfg.mc.n = n;
    }
    if let Some(alpha) = args.alpha {
        check_alpha(alpha)?;
        cfg.ks.alpha = alpha;
    }
    let out = args.out.or_else(|| cfg.output.clone());

    let table = run_scenario(&cfg)?;
    if mode == Mode::KsTest {
        let accepted = table.rows.iter().filter(|r| r.last() == Some(&Cell::Bool(true))).count();
        eprintln!("accepted {accepted}/{} at alpha = {}", table.rows.len(), cfg.ks.alpha);
    }
    let provenance = Provenance::new(mode.name(), cfg.mc.seed, cfg.mc.n, &text);
    let csv = render_csv(&table, &provenance);
    match out {
        Some(path) => fs::write(&path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fratio: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
