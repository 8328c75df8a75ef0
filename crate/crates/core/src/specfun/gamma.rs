//! Complex Gamma via the Lanczos approximation (g = 7, nine coefficients),
//! reflection for Re z < 1/2, and a log path for large imaginary parts.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Arguments closer than this to a nonpositive integer are rejected.
pub const POLE_EXCLUSION_RADIUS: f64 = 1e-10;

/// Above this imaginary part `sin(pi z)` and the direct product overflow, so
/// Gamma is assembled from its logarithm.
const DIRECT_IMAG_LIMIT: f64 = 100.0;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite Gamma argument {z}")));
    }
    if z.re < 0.5 {
        let n = z.re.round();
        if n <= 0.0 && (z - n).norm() < POLE_EXCLUSION_RADIUS {
            return Err(Error::Pole(z));
        }
    }
    Ok(())
}

/// `ln Gamma(z)` for Re z >= 1/2.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// A logarithm of `sin(pi z)` that stays finite for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 1.0 {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
        -i * PI * z + ((2.0 * i * PI * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else if z.im < -1.0 {
        // sin(pi z) = e^{i pi z} (1 - e^{-2 i pi z}) / (2i)
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() - (2.0 * i).ln()
    } else {
        (PI * z).sin().ln()
    }
}

/// A branch of `ln Gamma(z)`; the real part is `ln |Gamma(z)|` and the
/// imaginary part is a phase of Gamma (defined modulo 2 pi off the right
/// half-plane).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(LN_PI - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

/// Gamma function of a complex argument.
///
/// Relative accuracy is about 1e-14 for moderate |z|. For |Im z| in the
/// thousands and beyond the value is `exp(ln_gamma)`, whose relative accuracy
/// is limited by the size of `ln_gamma` itself; callers working there should
/// stay in log space.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z.im.abs() > DIRECT_IMAG_LIMIT {
        return Ok(ln_gamma(z)?.exp());
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        let sin = (PI * z).sin();
        Ok(PI / (sin * ln_gamma_right(1.0 - z).exp()))
    }
}

/// Gamma of a real argument.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(complex_gamma(Complex64::new(x, 0.0))?.re)
}

/// `ln |Gamma(x)|` for real x.
pub fn ln_gamma_abs(x: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re)
}

/// Digamma function of a real argument.
pub fn digamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite digamma argument {x}")));
    }
    if x <= 0.0 && (x - x.round()).abs() < POLE_EXCLUSION_RADIUS {
        return Err(Error::Pole(Complex64::new(x, 0.0)));
    }
    if x < 0.0 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail B_{2k} / (2k x^{2k}).
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32_760.0)))));
    Ok(shift + x.ln() - 0.5 / x - tail)
}
