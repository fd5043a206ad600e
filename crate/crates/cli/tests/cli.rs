use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fratio");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const RATIO: &str = r#"
[[numerator]]
gamma_bar_db = 1.0
m = 5.0
m_s = 10.0

[[denominator]]
gamma_bar_db = 1.0
m = 5.0
m_s = 10.0
"#;

const SWEEP_X: &str = "[sweep]\nvariable = \"x\"\nstart = 0.5\nstop = 2.0\npoints = 3\nspacing = \"log\"\n";

fn small(mode: &str) -> String {
    match mode {
        "pdf" | "cdf" | "fit" => format!("mode = \"{mode}\"\n{RATIO}\n{SWEEP_X}\n[mc]\nn = 2000\n"),
        "mgf" => format!("mode = \"mgf\"\n{RATIO}\n{}\n[mc]\nn = 2000\n", SWEEP_X.replace("\"x\"", "\"s\"")),
        "kstest" => format!("mode = \"kstest\"\n{RATIO}\n[fit]\nepsilon = \"zero\"\n\n[ks]\nsamples = 500\nrepetitions = 3\n"),
        "secrecy" => r#"mode = "secrecy"
[secrecy]
rate_threshold = 1.0
[[D]]
gamma_bar_db = 0.0
m = 6.0
m_s = 3.0
count = 2
[[E]]
gamma_bar_db = 0.0
m = 6.0
m_s = 3.0
[sweep]
variable = "gammaD_db"
start = 0.0
stop = 10.0
points = 3
[mc]
n = 2000
"#
        .into(),
        "relay" => r#"mode = "relay"
[relay]
rate = 1.0
[[AR]]
gamma_bar_db = 0.0
m = 6.0
m_s = 3.0
[[RB]]
gamma_bar_db = 5.0
m = 8.0
m_s = 10.0
[RR]
gamma_bar_db = 5.0
m = 1.5
m_s = 1.5
[sweep]
variable = "gammaAR_db"
start = 0.0
stop = 20.0
points = 3
[mc]
n = 2000
"#
        .into(),
        _ => unreachable!(),
    }
}

#[test]
fn golden_headers() {
    let dir = tempfile::tempdir().unwrap();
    let expected = [
        ("pdf", "x,exact_pdf,lognormal_pdf"),
        ("cdf", "x,exact_cdf,lognormal_cdf,mc_estimate,mc_stderr"),
        ("mgf", "s,exact_mgf,mc_estimate,mc_stderr"),
        ("fit", "x,exact_cdf,lognormal_cdf,abs_error"),
        ("kstest", "repetition,epsilon,mu,sigma,statistic,critical,accepted"),
        ("secrecy", "gammaD_db,sop_bound,sop_mc,sop_mc_stderr,sop_asymptotic,sop_lognormal,pnsc"),
        ("relay", "gammaAR_db,first_hop_cdf,second_hop_cdf,op_bound,op_mc,op_mc_stderr,op_lognormal"),
    ];
    for (mode, cols) in expected {
        let cfg = write(dir.path(), &format!("{mode}.toml"), &small(mode));
        let csv = stdout(&[mode, "--config", cfg.to_str().unwrap()]);
        assert_eq!(header(&csv), cols, "{mode}");
        assert!(csv.starts_with("# fratio "), "{mode}");
        assert!(csv.contains("# seed: 1\n") && csv.contains("# config_sha256: "), "{mode}");
        assert!(!csv.contains('\r'));
        let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(rows, 3, "{mode}");
        let width = cols.split(',').count();
        assert!(csv.lines().filter(|l| !l.starts_with('#')).all(|l| l.split(',').count() == width));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["cdf", "secrecy", "relay", "kstest"] {
        let cfg = write(dir.path(), &format!("{mode}.toml"), &small(mode));
        let cfg = cfg.to_str().unwrap();
        let a = dir.path().join(format!("{mode}_a.csv"));
        let b = dir.path().join(format!("{mode}_b.csv"));
        stdout(&[mode, "--config", cfg, "--seed", "9", "--out", a.to_str().unwrap()]);
        stdout(&[mode, "--config", cfg, "--seed", "9", "--out", b.to_str().unwrap()]);
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{mode}");
        let other = stdout(&[mode, "--config", cfg, "--seed", "10"]);
        assert_ne!(fs::read_to_string(&a).unwrap(), other, "{mode}");
    }
}

#[test]
fn overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cdf.toml", &small("cdf"));
    let csv = stdout(&["cdf", "--config", cfg.to_str().unwrap(), "--seed", "42", "--mc-samples", "100"]);
    assert!(csv.contains("# seed: 42\n") && csv.contains("# mc_samples: 100\n"));
}

#[test]
fn output_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config.csv");
    let text = format!("{}\n[output]\npath = {:?}\n", small("pdf"), target.to_str().unwrap());
    let cfg = write(dir.path(), "pdf.toml", &text);
    let out = run(&["pdf", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(target).unwrap().contains("exact_pdf"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", &small("pdf").replace("m_s = 10.0", "m_s = 0.5"));
    let out = run(&["pdf", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("m_s must exceed 1"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let good = write(dir.path(), "good.toml", &small("pdf"));
    let good = good.to_str().unwrap();
    assert_eq!(run(&["cdf", "--config", good]).status.code(), Some(2));
    assert_eq!(run(&["kstest", "--config", good, "--alpha", "1.5"]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["pdf", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
    let unwritable = dir.path().join("no_such_dir").join("out.csv");
    assert_eq!(run(&["pdf", "--config", good, "--out", unwritable.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn shipped_configs_parse() {
    let mut count = 0;
    for group in fs::read_dir(configs()).unwrap() {
        for entry in fs::read_dir(group.unwrap().path()).unwrap() {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            fratio_cli::parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 30, "{count}");
}
