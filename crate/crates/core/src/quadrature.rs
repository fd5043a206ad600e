//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// `∫_a^b f` to absolute error `abs_tol` or relative error `rel_tol`.
///
/// The integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![kronrod(&f, a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (non-finite integrand)",
                iterations: panels.len(),
            });
        }
        if error <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                iterations: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at machine resolution
            return Ok(total);
        }
        panels.push(kronrod(&f, p.a, mid));
        panels.push(kronrod(&f, mid, p.b));
    }
}

/// `∫_0^∞ f`, split at `scale`; the tail is mapped onto `(0, 1]` by
/// `x = scale / u`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, scale: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let head = integrate(&f, 0.0, scale, 0.5 * abs_tol, rel_tol)?;
    let tail = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = scale / u;
            let v = f(x) * scale / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        0.5 * abs_tol,
        rel_tol,
    )?;
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_and_singularities() {
        assert_relative_eq!(integrate(|x| x * x, 0.0, 3.0, 1e-14, 1e-14).unwrap(), 9.0, max_relative = 1e-14);
        // ∫_0^1 x^{-1/2} = 2
        assert_relative_eq!(
            integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12).unwrap(),
            2.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14, 1e-14).unwrap(),
            2.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn half_line() {
        assert_relative_eq!(
            integrate_half_line(|x: f64| (-x).exp(), 1.0, 1e-13, 1e-13).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // ∫ 1/(1+x)^{5/2} = 2/3
        assert_relative_eq!(
            integrate_half_line(|x: f64| (1.0 + x).powf(-2.5), 1.0, 1e-13, 1e-13).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-11
        );
    }
}
