//! Bessel functions of the first kind, real order and real argument.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::gamma::{gamma, ln_gamma_abs};

/// Largest supported order.
pub const MAX_ORDER: f64 = 20.0;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1e6;

/// Below this argument the power series is used for every order.
const SERIES_LIMIT: f64 = 8.0;
const MAX_ASYMPTOTIC_TERMS: usize = 120;

/// `J_nu(x)` for `0 <= nu <= 20` and `0 <= x <= 1e6`.
///
/// Small arguments use the power series, large ones the Hankel asymptotic
/// expansion (accepted once its smallest term is below double precision), and
/// the band in between Miller's backward recurrence normalized by the Neumann
/// sum `(x/2)^f = sum_k (f + 2k) Gamma(f + k) / k! J_{f+2k}(x)`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::Domain(format!("Bessel order {nu} outside [0, {MAX_ORDER}]")));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Domain(format!("Bessel argument {x} outside [0, {MAX_ARGUMENT:e}]")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_LIMIT {
        return Ok(series(nu, x));
    }
    if let Some(value) = asymptotic(nu, x) {
        return Ok(value);
    }
    Ok(miller(nu, x))
}

pub(crate) fn series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let lead = (nu * (0.5 * x).ln() - ln_gamma_abs(nu + 1.0).expect("nu + 1 >= 1")).exp();
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        let k = k as f64;
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && k > 0.5 * x {
            break;
        }
    }
    lead * sum
}

/// Hankel expansion; `None` when the terms stop decreasing before reaching
/// double precision.
pub(crate) fn asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut converged = false;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        // Past (2k-1)^2 > mu the terms only shrink until k ~ 2x and then diverge.
        if next.abs() > term.abs() && odd * odd > mu {
            return None;
        }
        term = next;
        // P collects the even terms with signs +,-,+ ..., Q the odd ones.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let phase = (0.5 * nu + 0.25) * PI;
    // cos(x - phase) and sin(x - phase) without forming x - phase.
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    Some((2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi))
}

pub(crate) fn miller(nu: f64, x: f64) -> f64 {
    let n = nu.floor() as usize;
    let f = nu - n as f64;
    let top = (n as f64).max(x);
    let mut start = top as usize + 30 + (60.0 * top).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let weight = |k: usize| -> f64 {
        if k == 0 {
            gamma(f + 1.0).expect("f + 1 >= 1")
        } else {
            // (f + 2k) Gamma(f + k) / k!
            let ln_ratio = ln_gamma_abs(f + k as f64).expect("positive")
                - ln_gamma_abs(k as f64 + 1.0).expect("positive");
            (f + 2.0 * k as f64) * ln_ratio.exp()
        }
    };

    let mut upper = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut norm = 0.0;
    let mut target = 0.0;
    let mut j = start;
    loop {
        if j == n {
            target = current;
        }
        if j % 2 == 0 {
            norm += weight(j / 2) * current;
        }
        if j == 0 {
            break;
        }
        let order = f + j as f64;
        let lower = 2.0 * order / x * current - upper;
        upper = current;
        current = lower;
        j -= 1;
        if current.abs() > 1e250 {
            current *= 1e-250;
            upper *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    target * (0.5 * x).powf(f) / norm
}
