//! Log-gamma on the real line and in the complex plane.
//!
//! Both paths share one Lanczos approximation (g = 671/128, 14 terms), which
//! holds close to double precision over the right half-plane. Arguments with
//! `Re z < 1/2` are pulled into the right half-plane: the complex path uses
//! the upward recurrence so the result stays on the principal branch (the
//! analytic continuation of `ln Γ(x)`, `x > 0`, cut along the negative real
//! axis), the real path uses the reflection formula.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used by the Mellin-Barnes machinery.
pub type ComplexValue = Complex64;

const LANCZOS_SHIFT: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

fn lanczos_real(x: f64) -> f64 {
    let tmp = x + LANCZOS_SHIFT;
    let head = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    head + LN_SQRT_2PI + (ser / x).ln()
}

fn lanczos_complex(z: Complex64) -> Complex64 {
    let tmp = z + LANCZOS_SHIFT;
    let head = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    head + LN_SQRT_2PI + ser.ln() - z.ln()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// Natural log of `|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        return Ok((lanczos_real(x), 1.0));
    }
    let s = sin_pi(x);
    let value = LN_PI - s.abs().ln() - lanczos_real(1.0 - x);
    Ok((value, s.signum()))
}

/// Natural log of `Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x >= 0.5 {
        lanczos_real(x)
    } else {
        LN_PI - sin_pi(x).ln() - lanczos_real(1.0 - x)
    }
}

/// Reciprocal gamma `1/Γ(x)` in log form: `(ln|1/Γ(x)|, sign)`, with zero
/// (`-∞`, sign `0`) at the poles of `Γ`.
pub fn ln_recip_gamma_signed(x: f64) -> (f64, f64) {
    match ln_gamma_signed(x) {
        Ok((v, s)) => (-v, s),
        Err(_) => (f64::NEG_INFINITY, 0.0),
    }
}

/// Principal-branch log-gamma on the complex plane.
///
/// Fails at the non-positive real integers and when the real part of the
/// result is not representable.
pub fn log_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(Error::Pole(z.re));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Overflow { re: z.re, im: z.im });
    }
    let value = if z.re >= 0.5 {
        lanczos_complex(z)
    } else {
        let shift = (0.5 - z.re).ceil();
        let n = shift as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut w = z;
        for _ in 0..n {
            acc += w.ln();
            w += 1.0;
        }
        lanczos_complex(w) - acc
    };
    if !value.re.is_finite() {
        return Err(Error::Overflow { re: z.re, im: z.im });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Stirling series after shifting `|z|` past 20; independent of the
    /// Lanczos coefficients.
    fn stirling_oracle(z: Complex64) -> Complex64 {
        let mut shift = Complex64::new(0.0, 0.0);
        let mut w = z;
        while w.norm() < 20.0 {
            shift += w.ln();
            w += 1.0;
        }
        // Bernoulli coefficients B_{2k} / (2k (2k-1)).
        let coeffs = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360360.0,
            1.0 / 156.0,
        ];
        let mut series = Complex64::new(0.0, 0.0);
        let w2 = w * w;
        let mut wp = w;
        for c in coeffs {
            series += c / wp;
            wp *= w2;
        }
        (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
    }

    #[test]
    fn classical_values() {
        assert!(log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(half.re, PI.sqrt().ln(), max_relative = 1e-14);
        assert_eq!(half.im, 0.0);
    }

    #[test]
    fn complex_point_matches_stirling_oracle() {
        let z = Complex64::new(3.7, 2.1);
        let got = log_gamma(z).unwrap();
        let oracle = stirling_oracle(z);
        assert!((got - oracle).norm() < 1e-13, "{got} vs {oracle}");
        // 40-digit reference: 0.78534695807382238876 + 2.58301292511526224859i
        assert_relative_eq!(got.re, 0.785_346_958_073_822_4, max_relative = 1e-13);
        assert_relative_eq!(got.im, 2.583_012_925_115_262_2, max_relative = 1e-13);
    }

    #[test]
    fn left_half_plane_and_tall_contours() {
        let a = log_gamma(Complex64::new(-2.5, 0.3)).unwrap();
        assert!((a - Complex64::new(-0.432_088_892_613_201_9, -9.093_345_421_289_741)).norm() < 1e-12);
        let b = log_gamma(Complex64::new(0.2, -30.0)).unwrap();
        assert!((b - Complex64::new(-47.225_301_594_789_44, -71.564_571_416_837_28)).norm() < 1e-11);
    }

    #[test]
    fn real_axis_relative_accuracy() {
        for &x in &[0.1, 0.3, 0.75, 1.5, 2.5, 3.3, 7.9, 17.0, 55.5, 233.3, 1000.5] {
            let got = log_gamma(Complex64::new(x, 0.0)).unwrap().re;
            let oracle = stirling_oracle(Complex64::new(x, 0.0)).re;
            assert!(
                (got - oracle).abs() <= 1e-13 * oracle.abs().max(1e-1),
                "x={x}: {got} vs {oracle}"
            );
        }
        assert_relative_eq!(ln_gamma(1000.5), 5_908.674_175_848_677, max_relative = 1e-14);
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(log_gamma(Complex64::new(x, 0.0)), Err(Error::Pole(x)));
            assert!(ln_gamma_signed(x).is_err());
        }
        assert!(log_gamma(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn recurrence_holds_off_the_pole_set() {
        for re in [-4.7, -1.3, 0.2, 0.9, 2.6, 11.1, 40.0] {
            for im in [-60.0, -7.5, -0.4, 0.0, 0.6, 3.0, 25.0] {
                let z = Complex64::new(re, im);
                let lhs = log_gamma(z + 1.0).unwrap();
                let rhs = log_gamma(z).unwrap() + z.ln();
                assert!(
                    (lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0),
                    "z={z}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn signed_real_log_gamma_on_negative_axis() {
        // Γ(-0.5) = -2√π
        let (v, s) = ln_gamma_signed(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert_relative_eq!(v, (2.0 * PI.sqrt()).ln(), max_relative = 1e-14);
        // Γ(-1.5) = 4√π/3
        let (v, s) = ln_gamma_signed(-1.5).unwrap();
        assert_eq!(s, 1.0);
        assert_relative_eq!(v, (4.0 * PI.sqrt() / 3.0).ln(), max_relative = 1e-14);
        let (r, s) = ln_recip_gamma_signed(-3.0);
        assert_eq!((r, s), (f64::NEG_INFINITY, 0.0));
    }
}
