//! Gauss hypergeometric function on the family
//! `a = (n + nu)/2, b = (n - nu)/2, c = n + 1` with integer `n >= 0` and
//! `nu` in (0, 1).
//!
//! Here `c = a + b + 1`, so the expansion about `x = 1` is the logarithmic
//! one. Four expansions are available (about 0, about 1, in `x/(x-1)` and in
//! `1/x`); each call picks the one with the smallest convergence ratio. The
//! cut `[1, inf)` is approached from above unless the argument is on the
//! lower side.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::{complex_gamma, digamma, gamma};

const FAMILY_TOLERANCE: f64 = 1e-12;
const MAX_TERMS: usize = 4000;
/// Largest convergence ratio accepted; beyond it the call is refused.
const MAX_RATIO: f64 = 0.95;

/// Hypergeometric parameters checked against the supported family.
#[derive(Debug, Clone, Copy)]
struct Family {
    a: f64,
    b: f64,
    c: f64,
}

impl Family {
    fn check(a: f64, b: f64, c: f64) -> Result<Self> {
        let n = c - 1.0;
        let nu = a - b;
        let ok = n >= -FAMILY_TOLERANCE
            && (n - n.round()).abs() <= FAMILY_TOLERANCE
            && nu > 0.0
            && nu < 1.0
            && (a + b - n).abs() <= FAMILY_TOLERANCE;
        if ok {
            Ok(Family { a, b, c })
        } else {
            Err(Error::UnsupportedParameters(format!(
                "2F1({a}, {b}; {c}; x) is not of the form ((n+nu)/2, (n-nu)/2; n+1)"
            )))
        }
    }
}

/// `2F1(a, b; c; x)` for the supported family.
///
/// The truncation rule stops each series once a term falls below 1e-17 of the
/// partial sum; for the chosen expansion the remainder is then bounded by that
/// term times `1/(1 - ratio)`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: Complex64) -> Result<Complex64> {
    let fam = Family::check(a, b, c)?;
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    if x == Complex64::new(1.0, 0.0) {
        return value_at_one(fam);
    }
    let one = Complex64::new(1.0, 0.0);
    let candidates = [
        (Expansion::Origin, x.norm()),
        (Expansion::Pfaff, (x / (x - one)).norm()),
        (Expansion::Unit, (one - x).norm()),
        (Expansion::Inverse, 1.0 / x.norm()),
    ];
    let (expansion, ratio) = candidates
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty");
    if ratio > MAX_RATIO {
        return Err(Error::Domain(format!(
            "2F1 argument {x} is too close to the points exp(+-i pi/3) for the available expansions"
        )));
    }
    match expansion {
        Expansion::Origin => series(fam.a, fam.b, fam.c, x),
        Expansion::Pfaff => pfaff(fam, x),
        Expansion::Unit => about_one(fam, x),
        Expansion::Inverse => inverse(fam, x),
    }
}

/// `Gamma(c) / (Gamma(a + 1) Gamma(b + 1))`, the value at `x = 1`.
fn value_at_one(fam: Family) -> Result<Complex64> {
    Ok(Complex64::new(gamma(fam.c)? / (gamma(fam.a + 1.0)? * gamma(fam.b + 1.0)?), 0.0))
}

#[derive(Debug, Clone, Copy)]
enum Expansion {
    Origin,
    Pfaff,
    Unit,
    Inverse,
}

/// Plain hypergeometric series, any real parameters with `c` not a
/// nonpositive integer.
pub(crate) fn series(a: f64, b: f64, c: f64, x: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..MAX_TERMS {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() || term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy { estimate: sum, error: term.norm() })
}

/// `2F1(a, b; c; x) = (1 - x)^{-a} 2F1(a, c - b; c; x / (x - 1))`.
fn pfaff(fam: Family, x: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = x / (x - one);
    Ok((one - x).powf(-fam.a) * series(fam.a, fam.c - fam.b, fam.c, w)?)
}

/// Logarithmic expansion about `x = 1` for `c = a + b + 1`:
///
/// `F = Gamma(c)/(Gamma(a+1)Gamma(b+1))
///    + (1-x) Gamma(c)/(Gamma(a)Gamma(b)) sum_n (a+1)_n (b+1)_n / (n! (n+1)!) (1-x)^n
///      [ln(1-x) - psi(n+1) - psi(n+2) + psi(a+n+1) + psi(b+n+1)]`.
fn about_one(fam: Family, x: Complex64) -> Result<Complex64> {
    let (a, b, c) = (fam.a, fam.b, fam.c);
    let one = Complex64::new(1.0, 0.0);
    let y = one - x;
    // For x = t + i0 with t > 1, 1 - x = (1 - t) - i0 carries arg -pi.
    let log_y = if x.im == 0.0 && x.re > 1.0 {
        Complex64::new(y.norm().ln(), -std::f64::consts::PI)
    } else {
        y.ln()
    };
    let regular = value_at_one(fam)?;
    let prefactor = gamma(c)? / (gamma(a)? * gamma(b)?);

    let mut psi_n1 = digamma(1.0)?;
    let mut psi_n2 = digamma(2.0)?;
    let mut psi_a = digamma(a + 1.0)?;
    let mut psi_b = digamma(b + 1.0)?;
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..MAX_TERMS {
        let term = coeff * (log_y - psi_n1 - psi_n2 + psi_a + psi_b);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && n > 2 {
            return Ok(regular + prefactor * y * sum);
        }
        let nf = n as f64;
        coeff *= (a + 1.0 + nf) * (b + 1.0 + nf) / ((nf + 1.0) * (nf + 2.0)) * y;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_n2 += 1.0 / (nf + 2.0);
        psi_a += 1.0 / (a + 1.0 + nf);
        psi_b += 1.0 / (b + 1.0 + nf);
    }
    Err(Error::Accuracy { estimate: regular + prefactor * y * sum, error: f64::NAN })
}

/// Connection formula to `1/x`, valid because `a - b = nu` is not an integer:
///
/// `F = Gamma(c)Gamma(b-a)/(Gamma(b)Gamma(c-a)) (-x)^{-a} 2F1(a, a-c+1; a-b+1; 1/x)
///    + Gamma(c)Gamma(a-b)/(Gamma(a)Gamma(c-b)) (-x)^{-b} 2F1(b, b-c+1; b-a+1; 1/x)`.
///
/// On the real cut the upper side is used.
fn inverse(fam: Family, x: Complex64) -> Result<Complex64> {
    let (a, b, c) = (fam.a, fam.b, fam.c);
    let x = if x.im == 0.0 { Complex64::new(x.re, 0.0) } else { x };
    // For x = t + i0 with t > 1, -x = -t - i0 must carry arg -pi.
    let minus_x = if x.im == 0.0 && x.re > 0.0 { Complex64::new(-x.re, -0.0) } else { -x };
    let log_minus_x = Complex64::new(minus_x.norm().ln(), minus_x.im.atan2(minus_x.re));
    let inv = Complex64::new(1.0, 0.0) / x;
    let g = |t: f64| complex_gamma(Complex64::new(t, 0.0)).map(|v| v.re);
    let first = g(c)? * g(b - a)? / (g(b)? * g(c - a)?) * (-a * log_minus_x).exp()
        * series(a, a - c + 1.0, a - b + 1.0, inv)?;
    let second = g(c)? * g(a - b)? / (g(a)? * g(c - b)?) * (-b * log_minus_x).exp()
        * series(b, b - c + 1.0, b - a + 1.0, inv)?;
    Ok(first + second)
}
