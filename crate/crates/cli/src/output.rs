//! CSV rendering.
//!
//! Reals use nine significant digits (`{:.8e}`); lines end in LF. A
//! `#`-prefixed provenance block precedes the header.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::scenario::{Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub mode: &'static str,
    pub seed: u64,
    pub mc_samples: u64,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(mode: &'static str, seed: u64, mc_samples: u64, config_text: &[u8]) -> Self {
        Self {
            mode,
            seed,
            mc_samples,
            config_sha256: hex::encode(Sha256::digest(config_text)),
        }
    }
}

pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.8e}")
    }
}

fn format_cell(c: &Cell) -> String {
    match *c {
        Cell::Num(x) => format_real(x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
    }
}

pub fn render_csv(table: &Table, prov: &Provenance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# fratio {VERSION}");
    let _ = writeln!(out, "# mode: {}", prov.mode);
    let _ = writeln!(out, "# seed: {}", prov.seed);
    let _ = writeln!(out, "# mc_samples: {}", prov.mc_samples);
    let _ = writeln!(out, "# config_sha256: {}", prov.config_sha256);
    for note in &table.notes {
        let _ = writeln!(out, "# {note}");
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(format_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
