//! Special functions and quadrature.

mod bessel;
mod gamma;
mod hankel;
mod hyper;
pub mod quad;

pub use bessel::{bessel_j, MAX_ARGUMENT as BESSEL_MAX_ARGUMENT, MAX_ORDER as BESSEL_MAX_ORDER};
pub use gamma::{complex_gamma, digamma, gamma, ln_gamma, ln_gamma_abs, POLE_EXCLUSION_RADIUS};
pub use hankel::hankel1;
pub use hyper::gauss_2f1;
pub use quad::{adaptive_quadrature, exp_sinh, gauss_kronrod, gauss_legendre, regularized_oscillatory, tanh_sinh, QuadEstimate, Regularization};
