//! Gauss hypergeometric function `2F1(a, b; c; x)` for real arguments `x < 1`.
//!
//! Strategy by argument:
//! - `|x| <= 1/2`: direct Maclaurin series.
//! - `x < -1/2`: Pfaff transformation onto `w = x/(x-1)` in `(1/3, 1)`.
//! - `1/2 < x < 1`: direct series, Euler-transformed when that speeds up the
//!   algebraic decay of the terms; close to 1 the `1 - x` connection formula
//!   takes over unless `c - a - b` is (near) an integer.

use crate::error::{Error, Result};

use super::gamma::ln_gamma_signed;

const MAX_TERMS: usize = 4_000_000;
const SERIES_EPS: f64 = 1e-17;
/// Above this argument the connection formula is preferred.
const CONNECTION_THRESHOLD: f64 = 0.9;
/// Minimum distance of `c - a - b` from an integer for the connection formula.
const INTEGER_GUARD: f64 = 0.05;

pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if c <= 0.0 && c == c.round() {
        return Err(Error::Domain {
            name: "c",
            value: c,
            reason: "c must not be a non-positive integer",
        });
    }
    if !(x < 1.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            reason: "argument must be below 1",
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.abs() <= 0.5 {
        return series(a, b, c, x);
    }
    if x < 0.0 {
        let w = x / (x - 1.0);
        // Of the two Pfaff forms pick the one whose series decays faster
        // near w = 1: the excess a' + b' - c is a - b for the first, b - a
        // for the second.
        if a <= b {
            return Ok((1.0 - x).powf(-a) * unit_interval(a, c - b, c, w)?);
        }
        return Ok((1.0 - x).powf(-b) * unit_interval(b, c - a, c, w)?);
    }
    unit_interval(a, b, c, x)
}

fn unit_interval(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    if w <= 0.5 {
        return series(a, b, c, w);
    }
    let excess = c - a - b;
    if w > CONNECTION_THRESHOLD && (excess - excess.round()).abs() > INTEGER_GUARD {
        return connection(a, b, c, w);
    }
    if excess < 0.0 {
        // Euler: 2F1(a,b;c;w) = (1-w)^{c-a-b} 2F1(c-a, c-b; c; w)
        return Ok((1.0 - w).powf(excess) * series(c - a, c - b, c, w)?);
    }
    series(a, b, c, w)
}

/// Connection formula between `w` and `1 - w` (non-integer `c - a - b`).
fn connection(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let u = 1.0 - w;
    let e = c - a - b;
    let first = gamma_ratio(&[c, e], &[c - a, c - b])?;
    let second = gamma_ratio(&[c, -e], &[a, b])?;
    let mut value = 0.0;
    if first != 0.0 {
        value += first * series(a, b, 1.0 - e, u)?;
    }
    if second != 0.0 {
        value += second * u.powf(e) * series(c - a, c - b, 1.0 + e, u)?;
    }
    Ok(value)
}

/// `Π Γ(num) / Π Γ(den)`, zero when a denominator argument is a pole.
fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut log = 0.0;
    let mut sign = 1.0;
    for &v in num {
        let (l, s) = ln_gamma_signed(v)?;
        log += l;
        sign *= s;
    }
    for &v in den {
        match ln_gamma_signed(v) {
            Ok((l, s)) => {
                log -= l;
                sign *= s;
            }
            Err(_) => return Ok(0.0),
        }
    }
    Ok(sign * log.exp())
}

fn series(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        let next = ((a + kf + 1.0) * (b + kf + 1.0) / ((c + kf + 1.0) * (kf + 2.0)) * x).abs();
        if next < 1.0 {
            let tail = term.abs() * next / (1.0 - next);
            if tail <= SERIES_EPS * sum.abs() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence {
        what: "hypergeometric series",
        iterations: MAX_TERMS,
    })
}
