//! Symbols of the wave operators as functions of the dilation generator.
//!
//! In channel `m` the reference wave operators are `phi_m^{+-}(A)` and on the
//! interacting channels the full wave operator restricted there is
//! `phi_m^-(A) + phi~_m(A) S~(kappa)`, where `A` generates dilations. All
//! Gamma quotients are evaluated through log-Gamma so that the symbols stay
//! accurate and unimodular where they should be for `|x|` up to 1e5.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::ExtensionPair;
use crate::grid::LogGrid;
use crate::linalg::{diag, Mat2};
use crate::scattering::{ab_phase, s_tilde};
use crate::specfun::ln_gamma;
use crate::Flux;

/// Symbols are evaluated for `|x|` up to this bound.
pub const SYMBOL_X_LIMIT: f64 = 1e5;
/// Input samples at the grid edges above this fraction of the peak make the
/// Mellin multiplier refuse the input.
pub const EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    PhiPlus,
    PhiMinus,
    PhiTilde,
}

/// A scalar symbol attached to channel `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSymbol {
    m: i64,
    variant: Variant,
    alpha: Flux,
}

impl ChannelSymbol {
    /// `PhiTilde` exists only on the interacting channels `m = 0, -1`.
    pub fn new(m: i64, variant: Variant, alpha: Flux) -> Result<Self> {
        if variant == Variant::PhiTilde && m != 0 && m != -1 {
            return Err(Error::Domain(format!("phi-tilde is defined for m in {{0, -1}}, got {m}")));
        }
        Ok(ChannelSymbol { m, variant, alpha })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn alpha(&self) -> Flux {
        self.alpha
    }

    /// `|m + alpha|`, the Bessel order of the channel.
    pub fn order(&self) -> f64 {
        (self.m as f64 + self.alpha.value()).abs()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match self.variant {
            Variant::PhiPlus | Variant::PhiMinus => phi_pm(self, x),
            Variant::PhiTilde => phi_tilde(self, x),
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= SYMBOL_X_LIMIT {
        Ok(())
    } else {
        Err(Error::Domain(format!("symbol argument {x} outside [-{SYMBOL_X_LIMIT:e}, {SYMBOL_X_LIMIT:e}]")))
    }
}

/// `arg Gamma(a + i y) - arg Gamma(a - i y) = 2 Im ln Gamma(a + i y)`.
fn gamma_quotient_phase(a: f64, y: f64) -> Result<f64> {
    Ok(2.0 * ln_gamma(Complex64::new(a, y))?.im)
}

/// `phi_m^{+-}(x) = e^{-+ i delta_m} Gamma((|m|+1+ix)/2)/Gamma((|m|+1-ix)/2)
///  * Gamma((|m+alpha|+1-ix)/2)/Gamma((|m+alpha|+1+ix)/2)`, a pure phase.
pub fn phi_pm(c: &ChannelSymbol, x: f64) -> Result<Complex64> {
    check_x(x)?;
    let sign = match c.variant {
        Variant::PhiPlus => -1.0,
        Variant::PhiMinus => 1.0,
        Variant::PhiTilde => return Err(Error::Domain("phi_pm called with phi-tilde".into())),
    };
    let delta = ab_phase(c.m, c.alpha);
    let theta = gamma_quotient_phase(0.5 * (c.m.abs() as f64 + 1.0), 0.5 * x)?
        - gamma_quotient_phase(0.5 * (c.order() + 1.0), 0.5 * x)?;
    Ok(Complex64::from_polar(1.0, theta + sign * delta))
}

/// `phi~_m(x) = (1/2pi) e^{-i pi |m|/2} e^{pi x/2} Gamma((|m|+1+ix)/2)/Gamma((|m|+1-ix)/2)
///  * Gamma((1+nu-ix)/2) Gamma((1-nu-ix)/2)` with `nu = |m + alpha|`.
pub fn phi_tilde(c: &ChannelSymbol, x: f64) -> Result<Complex64> {
    check_x(x)?;
    if c.variant != Variant::PhiTilde {
        return Err(Error::Domain("phi_tilde called with a phi-plus/minus symbol".into()));
    }
    let nu = c.order();
    let m = c.m.abs() as f64;
    let log = Complex64::new(-(2.0 * PI).ln() + 0.5 * PI * x, -0.5 * PI * m + gamma_quotient_phase(0.5 * (m + 1.0), 0.5 * x)?)
        + ln_gamma(Complex64::new(0.5 * (1.0 + nu), -0.5 * x))?
        + ln_gamma(Complex64::new(0.5 * (1.0 - nu), -0.5 * x))?;
    Ok(log.exp())
}

/// `diag(phi_0^-(x), phi_{-1}^-(x)) + diag(phi~_0(x), phi~_{-1}(x)) S~(kappa)`.
///
/// It tends to `S(kappa)` as `x -> +inf` and to the identity as `x -> -inf`.
pub fn wave_symbol(p: &ExtensionPair, alpha: Flux, x: f64, kappa: f64) -> Result<Mat2> {
    let minus = [ChannelSymbol::new(0, Variant::PhiMinus, alpha)?, ChannelSymbol::new(-1, Variant::PhiMinus, alpha)?];
    let tilde = [ChannelSymbol::new(0, Variant::PhiTilde, alpha)?, ChannelSymbol::new(-1, Variant::PhiTilde, alpha)?];
    let base = diag(phi_pm(&minus[0], x)?, phi_pm(&minus[1], x)?);
    let correction = s_tilde(p, alpha, kappa)?;
    if correction.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(base);
    }
    Ok(base + diag(phi_tilde(&tilde[0], x)?, phi_tilde(&tilde[1], x)?) * correction)
}

/// Apply `symbol(A)` to radial samples `f(r_j)` on a logarithmic grid.
///
/// With `g(t) = e^t f(e^t)` the dilation generator acts as `-i d/dt`, so
/// `symbol(A)` multiplies the Fourier transform of `g` (kernel `e^{-i xi t}`)
/// by `symbol(xi)`. The samples are zero padded to four times their length
/// before the FFT; input that does not vanish at both ends of the grid is
/// refused because it would wrap around.
pub fn mellin_multiplier<F>(symbol: F, f: &[Complex64], grid: &LogGrid) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if f.len() != grid.len {
        return Err(Error::Domain(format!("{} samples on a grid of {} points", f.len(), grid.len)));
    }
    let g: Vec<Complex64> = f.iter().enumerate().map(|(j, v)| v * grid.radius(j)).collect();
    let peak = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); f.len()]);
    }
    let edge = g[0].norm().max(g[g.len() - 1].norm()) / peak;
    if edge > EDGE_TOLERANCE {
        return Err(Error::Aliasing(edge));
    }
    let n = (4 * g.len()).next_power_of_two();
    let mut buffer = vec![Complex64::new(0.0, 0.0); n];
    buffer[..g.len()].copy_from_slice(&g);
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buffer);
    let unit = 2.0 * PI / (n as f64 * grid.step);
    for (k, v) in buffer.iter_mut().enumerate() {
        let wave = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        *v *= symbol(wave * unit)?;
    }
    planner.plan_fft_inverse(n).process(&mut buffer);
    let scale = 1.0 / n as f64;
    Ok((0..f.len()).map(|j| buffer[j] * scale / grid.radius(j)).collect())
}

/// [`mellin_multiplier`] with a channel symbol.
pub fn mellin_action(c: &ChannelSymbol, f: &[Complex64], grid: &LogGrid) -> Result<Vec<Complex64>> {
    mellin_multiplier(|x| c.eval(x), f, grid)
}
