//! Self-adjoint extensions of the two-dimensional Aharonov-Bohm operator.
//!
//! Every extension is labelled by an admissible boundary pair `(C, D)` of
//! 2x2 complex matrices acting on the two channels `m = 0` and `m = -1` that
//! see the point interaction. For a given flux `alpha` in (0, 1) the crate
//! computes the negative bound states, the 2x2 scattering matrix as a
//! function of the momentum `kappa` together with its low- and high-energy
//! limits, and the symbols of the wave operators in the spectral
//! representation of the dilation generator. The [`verify`] module checks the
//! underlying integral identities by independent quadrature.

pub mod error;
pub mod extension;
pub mod grid;
pub mod linalg;
pub mod scattering;
pub mod specfun;
pub mod spectrum;
pub mod verify;
pub mod waveop;
pub mod weyl;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use extension::{ExtensionPair, TripleReduction, UnitaryParam};
pub use linalg::Mat2;

/// Smallest allowed distance of the flux from 0 and 1.
pub const FLUX_MARGIN: f64 = 1e-9;

/// Magnetic flux `alpha`, reduced to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Flux(f64);

impl Flux {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= FLUX_MARGIN && alpha <= 1.0 - FLUX_MARGIN {
            Ok(Flux(alpha))
        } else {
            Err(Error::Domain(format!(
                "flux {alpha} must lie in (0, 1) at least {FLUX_MARGIN:e} away from the endpoints"
            )))
        }
    }

    /// Exactly one half.
    pub fn half() -> Self {
        Flux(0.5)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Bessel order `1 - alpha` of the `m = -1` channel.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    /// Exact comparison with one half; the special cases of the asymptotic
    /// classification apply only to this stored value.
    pub fn is_half(self) -> bool {
        self.0 == 0.5
    }
}

impl TryFrom<f64> for Flux {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Flux::new(alpha)
    }
}

impl From<Flux> for f64 {
    fn from(flux: Flux) -> f64 {
        flux.0
    }
}
