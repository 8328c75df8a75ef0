//! Mellin multiplier against a direct composition of Hankel transforms.
//!
//! For a radial function `f` the incoming channel wave operator is
//! `e^{i delta} H_nu H_|m| f` with `(H_mu g)(k) = int J_mu(k r) g(r) r dr` and
//! `nu = |m + alpha|`. Both transforms are done by composite Gauss-Legendre
//! quadrature in log variables.

use abflux::grid::LogGrid;
use abflux::scattering::ab_phase;
use abflux::specfun::{bessel_j, gauss_legendre};
use abflux::waveop::{mellin_action, ChannelSymbol, Variant};
use abflux::Flux;
use num_complex::Complex64;
use rayon::prelude::*;

const WIDTH: f64 = 0.3;

fn bump(r: f64) -> f64 {
    (-r.ln().powi(2) / (2.0 * WIDTH * WIDTH)).exp()
}

/// Nodes and weights for `int_{e^a}^{e^b} g(s) ds` in the variable `ln s`.
fn log_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(12);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let s = (mid + 0.5 * h * xi).exp();
            out.push((s, 0.5 * h * wi * s));
        }
    }
    out
}

fn hankel_composition(m: i64, alpha: Flux, rho: &[f64]) -> Vec<Complex64> {
    let outer = (m as f64 + alpha.value()).abs();
    let inner = m.unsigned_abs() as f64;
    let radial = log_rule(-2.8, 2.8, 320);
    let momenta = log_rule(-8.0, 4.2, 420);
    let transformed: Vec<f64> = momenta
        .par_iter()
        .map(|&(k, _)| radial.iter().map(|&(r, w)| w * bessel_j(inner, k * r).unwrap() * bump(r) * r).sum())
        .collect();
    let phase = Complex64::from_polar(1.0, ab_phase(m, alpha));
    rho.par_iter()
        .map(|&p| {
            let v: f64 = momenta.iter().zip(&transformed).map(|(&(k, w), fk)| w * bessel_j(outer, k * p).unwrap() * fk * k).sum();
            phase * v
        })
        .collect()
}

#[test]
fn phi_minus_matches_hankel_composition() {
    let grid = LogGrid::new((-14.0f64).exp(), 14.0f64.exp(), 2048).unwrap();
    let f: Vec<Complex64> = grid.radii().iter().map(|&r| Complex64::new(bump(r), 0.0)).collect();
    for (m, a) in [(0i64, 0.3), (-1, 0.5), (2, 0.7)] {
        let alpha = Flux::new(a).unwrap();
        let symbol = ChannelSymbol::new(m, Variant::PhiMinus, alpha).unwrap();
        let action = mellin_action(&symbol, &f, &grid).unwrap();
        // Compare where the output carries its mass: ln r in [-2, 2].
        let window: Vec<usize> = (0..grid.len).filter(|&j| grid.radius(j).ln().abs() <= 2.0).step_by(4).collect();
        let rho: Vec<f64> = window.iter().map(|&j| grid.radius(j)).collect();
        let oracle = hankel_composition(m, alpha, &rho);
        let (mut diff, mut norm) = (0.0, 0.0);
        for (i, &j) in window.iter().enumerate() {
            let weight = rho[i] * rho[i];
            diff += weight * (action[j] - oracle[i]).norm_sqr();
            norm += weight * oracle[i].norm_sqr();
        }
        let relative = (diff / norm).sqrt();
        assert!(relative <= 1e-4, "m = {m}, alpha = {a}: relative L2 deviation {relative:e}");
    }
}
