//! One-dimensional sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Steepness of tanh-spaced grids.
pub const TANH_STEEPNESS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
    /// Nodes `x` with `tanh(beta (x - c) / h)` uniform, `c` the midpoint and
    /// `h` the half-width: dense in the middle, sparse towards both ends.
    Tanh,
}

/// `count` nodes from `min` to `max` inclusive.
pub fn points(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("grid must have at least one point".into()));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::Domain(format!("invalid grid bounds [{min}, {max}]")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let unit = |j: usize| j as f64 / (count - 1) as f64;
    let mut out: Vec<f64> = match spacing {
        Spacing::Linear => (0..count).map(|j| min + (max - min) * unit(j)).collect(),
        Spacing::Log => {
            if min <= 0.0 {
                return Err(Error::Domain(format!("log grid needs positive bounds, got {min}")));
            }
            let (a, b) = (min.ln(), max.ln());
            (0..count).map(|j| (a + (b - a) * unit(j)).exp()).collect()
        }
        Spacing::Tanh => {
            let (c, h) = (0.5 * (min + max), 0.5 * (max - min));
            let norm = TANH_STEEPNESS.tanh();
            (0..count)
                .map(|j| c + h * (norm * (2.0 * unit(j) - 1.0)).atanh() / TANH_STEEPNESS)
                .collect()
        }
    };
    out[0] = min;
    out[count - 1] = max;
    Ok(out)
}

/// Uniform grid in `ln r`: `r_j = exp(ln_start + j step)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub ln_start: f64,
    pub step: f64,
    pub len: usize,
}

impl LogGrid {
    pub fn new(r_min: f64, r_max: f64, len: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && len >= 2) {
            return Err(Error::Domain(format!("invalid log grid [{r_min}, {r_max}] with {len} points")));
        }
        Ok(LogGrid { ln_start: r_min.ln(), step: (r_max.ln() - r_min.ln()) / (len - 1) as f64, len })
    }

    pub fn radius(&self, j: usize) -> f64 {
        (self.ln_start + j as f64 * self.step).exp()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.radius(j)).collect()
    }
}
