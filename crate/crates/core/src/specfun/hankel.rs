//! Hankel function of the first kind for orders in (0, 1).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma_abs;

const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 25.0;
const MAX_CF_ITERATIONS: usize = 10_000;

/// `H^(1)_nu(w)` for `0 < nu < 1` and `-pi/2 < arg w <= pi`.
///
/// The negative real axis is read as `arg w = pi` whatever the sign of the
/// zero imaginary part.
pub fn hankel1(nu: f64, w: Complex64) -> Result<Complex64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("Hankel order {nu} outside (0, 1)")));
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(format!("non-finite Hankel argument {w}")));
    }
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::SingularArgument("H^(1) at w = 0".into()));
    }
    let w = if w.im == 0.0 { Complex64::new(w.re, 0.0) } else { w };
    if w.re == 0.0 && w.im < 0.0 {
        return Err(Error::Domain(format!("arg {w} = -pi/2 is outside (-pi/2, pi]")));
    }
    let radius = w.norm();
    if radius <= SERIES_RADIUS {
        Ok(small_argument(nu, w))
    } else if radius >= ASYMPTOTIC_RADIUS {
        Ok(large_argument(nu, w))
    } else {
        // H^(1)_nu(w) = (2 / (i pi)) e^{-i pi nu / 2} K_nu(-i w)
        let x = -Complex64::i() * w;
        let k = if x.re >= 0.0 {
            bessel_k_cf(nu, x)?
        } else {
            // The continued fraction stalls near arg x = -pi; continue from
            // y = x e^{i pi} instead: K(y e^{-i pi}) = e^{i pi nu} K(y) + i pi I(y).
            let y = -x;
            Complex64::from_polar(1.0, PI * nu) * bessel_k_cf(nu, y)? + Complex64::i() * PI * power_series(nu, y, 1.0)
        };
        Ok(2.0 / (Complex64::i() * PI) * Complex64::from_polar(1.0, -0.5 * PI * nu) * k)
    }
}

/// `(J_{-nu}(w) - e^{-i pi nu} J_nu(w)) / (i sin(pi nu))` from the power series.
fn small_argument(nu: f64, w: Complex64) -> Complex64 {
    let j_minus = power_series(-nu, w, -1.0);
    let j_plus = power_series(nu, w, -1.0);
    (j_minus - Complex64::from_polar(1.0, -PI * nu) * j_plus) / (Complex64::i() * (PI * nu).sin())
}

/// Power series of `J_order(w)` (`sign = -1`) or `I_order(w)` (`sign = 1`)
/// for non-integer order.
fn power_series(order: f64, w: Complex64, sign: f64) -> Complex64 {
    let half = 0.5 * w;
    let q = sign * half * half;
    // 1 / Gamma(order + 1) keeps its sign for order in (-1, 1).
    let inv_gamma = (-ln_gamma_abs(order + 1.0).expect("order + 1 > 0")).exp();
    let lead = (order * half.ln()).exp() * inv_gamma;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        let k = k as f64;
        term *= q / (k * (order + k));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

/// Hankel's expansion, valid for large |w| with -pi < arg w < 2 pi.
fn large_argument(nu: f64, w: Complex64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let i_over_w = Complex64::i() / w;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64) * i_over_w;
        if next.norm() > term.norm() && odd * odd > mu {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    let prefactor = (2.0 / PI).sqrt() * (-0.5 * w.ln()).exp();
    let phase = (Complex64::i() * (w - (0.5 * nu + 0.25) * PI)).exp();
    prefactor * phase * sum
}

/// `K_nu(x)` for |x| >= 2, |arg x| < pi, via Steed's evaluation of Temme's
/// continued fraction, with one upward recurrence step when nu >= 1/2.
pub(crate) fn bessel_k_cf(nu: f64, x: Complex64) -> Result<Complex64> {
    let shift = if nu >= 0.5 { 1.0 } else { 0.0 };
    let mu = nu - shift;
    let one = Complex64::new(1.0, 0.0);

    let mut b = 2.0 * (one + x);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25 - mu * mu;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 1..MAX_CF_ITERATIONS {
        let i = i as f64;
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-16 * s.norm() {
            converged = true;
            break;
        }
    }
    if !converged || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Accuracy { estimate: s, error: f64::NAN });
    }
    let h = a1 * h;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    if shift == 0.0 {
        Ok(k_mu)
    } else {
        Ok(k_mu * (mu + x + 0.5 - h) / x)
    }
}
