//! Weyl function, boundary coefficients, gamma-field profiles and the Krein
//! matrix of the boundary triple attached to channels 0 and -1.
//!
//! Channel 0 carries Bessel order `alpha`, channel -1 order `1 - alpha`.
//! Powers of `k = sqrt(z)` are always formed from the stored `log k`, never
//! from powers of `z`, so the phases of the boundary values are exact.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::ExtensionPair;
use crate::linalg::{diag, frobenius, Mat2, Vec2};
use crate::specfun::{hankel1, ln_gamma_abs};
use crate::Flux;

/// Orders closer than this to 0 or 1 are refused by [`coeff_ab`].
pub const ORDER_MARGIN: f64 = 1e-6;
/// `|det(DM - C)| < KREIN_CONDITION_LIMIT (|D| |M| + |C|)^2` signals an
/// eigenvalue. The scale is that of the terms that cancel, so a matrix that
/// vanishes up to rounding is caught as well.
pub const KREIN_CONDITION_LIMIT: f64 = 1e-14;

/// Which limit a point on the positive axis stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `z` outside `[0, inf)`.
    OffAxis,
    /// `lambda + i0`.
    BoundaryPlus,
    /// `lambda - i0`.
    BoundaryMinus,
}

/// A spectral parameter together with its square root `k` and `log k` on
/// the branch `Im k > 0` (closure of it on the positive axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    z: Complex64,
    k: Complex64,
    log_k: Complex64,
    side: Side,
}

impl SpectralPoint {
    /// `z` off the closed positive half-axis; negative reals are allowed.
    pub fn off_axis(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("non-finite spectral point {z}")));
        }
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::Domain(format!("{z} lies on [0, inf); use a boundary side")));
        }
        let log_z_half = 0.5 * z.norm().ln();
        // arg k in (0, pi): half the argument of z measured in (0, 2 pi).
        let mut theta = z.im.atan2(z.re);
        if theta <= 0.0 {
            theta += 2.0 * PI;
        }
        if z.im == 0.0 {
            theta = PI;
        }
        let log_k = Complex64::new(log_z_half, 0.5 * theta);
        Ok(SpectralPoint { z, k: log_k.exp(), log_k, side: Side::OffAxis })
    }

    /// `z = -t` with `t > 0`, so `k = i sqrt(t)`.
    pub fn negative(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("expected t > 0, got {t}")));
        }
        Self::off_axis(Complex64::new(-t, 0.0))
    }

    /// `lambda + i0`: `k = sqrt(lambda)`.
    pub fn boundary_plus(lambda: f64) -> Result<Self> {
        Self::boundary(lambda, Side::BoundaryPlus)
    }

    /// `lambda - i0`: `k = -sqrt(lambda)` with `log k = ln sqrt(lambda) + i pi`.
    pub fn boundary_minus(lambda: f64) -> Result<Self> {
        Self::boundary(lambda, Side::BoundaryMinus)
    }

    fn boundary(lambda: f64, side: Side) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("boundary values need lambda > 0, got {lambda}")));
        }
        let root = lambda.sqrt();
        let (k, log_k) = match side {
            Side::BoundaryMinus => (Complex64::new(-root, 0.0), Complex64::new(root.ln(), PI)),
            _ => (Complex64::new(root, 0.0), Complex64::new(root.ln(), 0.0)),
        };
        Ok(SpectralPoint { z: Complex64::new(lambda, 0.0), k, log_k, side })
    }

    /// Boundary point on the plus side from the momentum `kappa = sqrt(lambda)`,
    /// keeping `ln kappa` exact for very large or small momenta.
    pub fn from_momentum(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("momentum must be positive, got {kappa}")));
        }
        Ok(SpectralPoint {
            z: Complex64::new(kappa * kappa, 0.0),
            k: Complex64::new(kappa, 0.0),
            log_k: Complex64::new(kappa.ln(), 0.0),
            side: Side::BoundaryPlus,
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn log_k(&self) -> Complex64 {
        self.log_k
    }

    pub fn side(&self) -> Side {
        self.side
    }
}

fn check_order(nu: f64) -> Result<()> {
    if nu.is_finite() && nu >= ORDER_MARGIN && nu <= 1.0 - ORDER_MARGIN {
        Ok(())
    } else {
        Err(Error::Domain(format!("order {nu} must lie in [{ORDER_MARGIN:e}, 1 - {ORDER_MARGIN:e}]")))
    }
}

/// Coefficients of `k^{-nu}` and `k^{nu}` in the small-argument behaviour of
/// `H^(1)_nu(k r)`:
/// `a = -2^nu i k^{-nu} / (sin(pi nu) Gamma(1 - nu))`,
/// `b = 2^{-nu} i e^{-i pi nu} k^nu / (sin(pi nu) Gamma(1 + nu))`.
pub fn coeff_ab(nu: f64, s: &SpectralPoint) -> Result<(Complex64, Complex64)> {
    check_order(nu)?;
    let sin = (PI * nu).sin();
    let ln2 = std::f64::consts::LN_2;
    let log_a = Complex64::new(nu * ln2 - sin.ln() - ln_gamma_abs(1.0 - nu)?, 0.0) - nu * s.log_k;
    let log_b = Complex64::new(-nu * ln2 - sin.ln() - ln_gamma_abs(1.0 + nu)?, -PI * nu) + nu * s.log_k;
    let i = Complex64::i();
    Ok((-i * log_a.exp(), i * log_b.exp()))
}

/// Diagonal Weyl function; entry 0 belongs to channel 0, entry 1 to channel -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylMatrix {
    pub entries: [Complex64; 2],
}

impl WeylMatrix {
    pub fn matrix(&self) -> Mat2 {
        diag(self.entries[0], self.entries[1])
    }
}

/// Logarithm of `(2/pi) sin(pi alpha) Gamma(1 - nu)^2 4^{-nu}`, the modulus
/// of the Weyl entry of order `nu` without the `k` power.
fn log_weyl_scale(alpha: Flux, nu: f64) -> Result<f64> {
    Ok((2.0 / PI * (PI * alpha.value()).sin()).ln() + 2.0 * ln_gamma_abs(1.0 - nu)? - 2.0 * nu * std::f64::consts::LN_2)
}

/// `M(z)` with entries `-(2/pi) sin(pi alpha) Gamma(1-nu)^2 e^{-i pi nu} 4^{-nu} (k^nu)^2`
/// for `nu = alpha` and `nu = 1 - alpha`.
pub fn weyl_m(alpha: Flux, s: &SpectralPoint) -> Result<WeylMatrix> {
    let mut entries = [Complex64::new(0.0, 0.0); 2];
    for (slot, nu) in entries.iter_mut().zip([alpha.value(), alpha.complement()]) {
        let exponent = Complex64::new(log_weyl_scale(alpha, nu)?, -PI * nu) + 2.0 * nu * s.log_k;
        *slot = -exponent.exp();
    }
    Ok(WeylMatrix { entries })
}

/// Values of the Weyl entries at `z = -t`, from `ln t`; both are negative
/// and decrease strictly as `t` grows.
pub fn weyl_negative_axis(alpha: Flux, ln_t: f64) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (slot, nu) in out.iter_mut().zip([alpha.value(), alpha.complement()]) {
        *slot = -(log_weyl_scale(alpha, nu)? + nu * ln_t).exp();
    }
    Ok(out)
}

/// Radial profiles of the deficiency solution with boundary data `xi`:
/// `xi_0 H_alpha(k r) / a_alpha` and `xi_{-1} H_{1-alpha}(k r) / a_{1-alpha}`.
pub fn gamma_field_profile(alpha: Flux, s: &SpectralPoint, xi: &Vec2, r: f64) -> Result<[Complex64; 2]> {
    if s.side != Side::OffAxis {
        return Err(Error::Domain("gamma-field profiles need an off-axis spectral point".into()));
    }
    if r == 0.0 {
        return Err(Error::SingularArgument("profile at r = 0".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (channel, nu) in [alpha.value(), alpha.complement()].into_iter().enumerate() {
        if xi[channel] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (a, _) = coeff_ab(nu, s)?;
        out[channel] = xi[channel] * hankel1(nu, s.k * r)? / a;
    }
    Ok(out)
}

fn solve_checked(m: &Mat2, scale: f64, z: Complex64) -> Result<Mat2> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if scale == 0.0 || det.norm() < KREIN_CONDITION_LIMIT * scale * scale {
        return Err(Error::EigenvalueHit(z));
    }
    Ok(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// `-(D M(z) - C)^{-1} D`, the matrix of the rank-two Krein correction.
pub fn krein_matrix(p: &ExtensionPair, alpha: Flux, s: &SpectralPoint) -> Result<Mat2> {
    if p.d().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(Mat2::zeros());
    }
    let m = weyl_m(alpha, s)?.matrix();
    let scale = frobenius(p.d()) * frobenius(&m) + frobenius(p.c());
    let inv = solve_checked(&(p.d() * m - p.c()), scale, s.z)?;
    Ok(-(inv * p.d()))
}

/// The same matrix in the form `-D* (M(z) D* - C*)^{-1}`.
pub fn krein_matrix_right(p: &ExtensionPair, alpha: Flux, s: &SpectralPoint) -> Result<Mat2> {
    if p.d().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(Mat2::zeros());
    }
    let m = weyl_m(alpha, s)?.matrix();
    let scale = frobenius(p.d()) * frobenius(&m) + frobenius(p.c());
    let inv = solve_checked(&(m * p.d().adjoint() - p.c().adjoint()), scale, s.z)?;
    Ok(-(p.d().adjoint() * inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{validate_pair, UnitaryParam};
    use crate::linalg::{c64, real_diag};
    use crate::specfun::gamma;
    use proptest::prelude::*;

    fn flux(a: f64) -> Flux {
        Flux::new(a).unwrap()
    }

    #[test]
    fn square_root_branch() {
        for z in [c64(-4.0, 0.0), c64(1.0, 1e-3), c64(1.0, -1e-3), c64(-3.0, -2.0), c64(0.0, 5.0)] {
            let s = SpectralPoint::off_axis(z).unwrap();
            assert!(s.k().im > 0.0);
            assert!((s.k() * s.k() - z).norm() <= 1e-13 * z.norm());
        }
        assert!(SpectralPoint::off_axis(c64(2.0, 0.0)).is_err());
        let minus = SpectralPoint::boundary_minus(4.0).unwrap();
        assert_eq!(minus.k(), c64(-2.0, 0.0));
    }

    #[test]
    fn coefficient_examples() {
        let nu = 0.37;
        let plus = SpectralPoint::boundary_plus(2.0).unwrap();
        let minus = SpectralPoint::boundary_minus(2.0).unwrap();
        let ratio = coeff_ab(nu, &minus).unwrap().0 / coeff_ab(nu, &plus).unwrap().0;
        assert!((ratio - Complex64::from_polar(1.0, -PI * nu)).norm() < 1e-14);

        let s = SpectralPoint::negative(3.0).unwrap();
        let (a, b) = coeff_ab(nu, &s).unwrap();
        // k = i sqrt(3): a carries i e^{-i pi nu/2}, b carries i e^{-i pi nu} e^{i pi nu/2}.
        let q = b / a;
        assert!(q.im.abs() < 1e-15 * q.norm());

        let s = SpectralPoint::off_axis(c64(0.0, 1.0)).unwrap();
        let (a, _) = coeff_ab(0.5, &s).unwrap();
        let expected =
            -Complex64::new(0.0, 2f64.sqrt()) * Complex64::from_polar(1.0, -PI / 8.0) / gamma(0.5).unwrap();
        assert!((a - expected).norm() < 1e-15);
        assert!(coeff_ab(0.0, &s).is_err());
    }

    #[test]
    fn weyl_examples() {
        let m = weyl_m(Flux::half(), &SpectralPoint::negative(1.0).unwrap()).unwrap();
        for e in m.entries {
            assert!((e - c64(-1.0, 0.0)).norm() < 1e-15);
        }
        let m = weyl_m(Flux::half(), &SpectralPoint::negative(4.0).unwrap()).unwrap();
        assert!((m.entries[0] + 2.0).norm() < 1e-14);
        let alpha = flux(0.3);
        let plus = weyl_m(alpha, &SpectralPoint::boundary_plus(2.0).unwrap()).unwrap();
        let minus = weyl_m(alpha, &SpectralPoint::boundary_minus(2.0).unwrap()).unwrap();
        for j in 0..2 {
            assert!((plus.entries[j] - minus.entries[j].conj()).norm() < 1e-15);
        }
        let tiny = weyl_m(alpha, &SpectralPoint::off_axis(c64(1e-12, 1e-12)).unwrap()).unwrap();
        assert!(tiny.entries[0].norm() < 1e-3 && tiny.entries[1].norm() < 1e-7);
        let axis = weyl_negative_axis(alpha, 2f64.ln()).unwrap();
        let direct = weyl_m(alpha, &SpectralPoint::negative(2.0).unwrap()).unwrap();
        for j in 0..2 {
            assert!((direct.entries[j] - axis[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn profile_examples() {
        let alpha = flux(0.3);
        let s = SpectralPoint::off_axis(c64(0.0, 1.0)).unwrap();
        let zero = gamma_field_profile(alpha, &s, &Vec2::zeros(), 1.0).unwrap();
        assert_eq!(zero, [c64(0.0, 0.0); 2]);
        let xi = Vec2::new(c64(0.7, -0.2), c64(0.0, 1.0));
        for r in [1e-4f64, 1e-6] {
            let v = gamma_field_profile(alpha, &s, &xi, r).unwrap();
            let lead0 = v[0] * r.powf(0.3);
            let lead1 = v[1] * r.powf(0.7);
            assert!((lead0 - xi[0]).norm() < 10.0 * r.powf(0.4));
            assert!((lead1 - xi[1]).norm() < 10.0 * r.powf(0.4));
        }
        assert!(matches!(gamma_field_profile(alpha, &s, &xi, 0.0), Err(Error::SingularArgument(_))));
    }

    #[test]
    fn krein_examples() {
        let s = SpectralPoint::negative(4.0).unwrap();
        let f = ExtensionPair::friedrichs();
        assert_eq!(krein_matrix(&f, Flux::half(), &s).unwrap(), Mat2::zeros());
        let p = validate_pair(-Mat2::identity(), Mat2::identity()).unwrap();
        let k = krein_matrix(&p, Flux::half(), &s).unwrap();
        assert!((k - Mat2::identity()).norm() < 1e-14);
        let hit = krein_matrix(&p, Flux::half(), &SpectralPoint::negative(1.0).unwrap());
        assert!(matches!(hit, Err(Error::EigenvalueHit(_))));
        let q = validate_pair(real_diag(0.0, 1.0), real_diag(1.0, 0.0)).unwrap();
        let s = SpectralPoint::off_axis(c64(0.3, 2.0)).unwrap();
        let left = krein_matrix(&q, flux(0.6), &s).unwrap();
        let right = krein_matrix_right(&q, flux(0.6), &s).unwrap();
        assert!((left - right).norm() < 1e-14);
    }

    fn unitary_strategy() -> impl Strategy<Value = UnitaryParam> {
        proptest::array::uniform8(-1.0f64..1.0).prop_filter_map("degenerate sample", |v| {
            let g = Mat2::new(c64(v[0], v[1]), c64(v[2], v[3]), c64(v[4], v[5]), c64(v[6], v[7]));
            UnitaryParam::from_gaussian(&g).ok()
        })
    }

    proptest! {
        #[test]
        fn herglotz_and_conjugation(alpha in 0.01f64..0.99, re in -50.0f64..50.0, im in 1e-3f64..50.0) {
            let alpha = flux(alpha);
            let z = c64(re, im);
            let m = weyl_m(alpha, &SpectralPoint::off_axis(z).unwrap()).unwrap();
            let mbar = weyl_m(alpha, &SpectralPoint::off_axis(z.conj()).unwrap()).unwrap();
            for j in 0..2 {
                prop_assert!(m.entries[j].im >= 0.0);
                prop_assert!((m.entries[j] - mbar.entries[j].conj()).norm() <= 1e-12 * m.entries[j].norm());
            }
        }

        #[test]
        fn krein_forms_and_reduction_agree(u in unitary_strategy(), alpha in 0.05f64..0.95, re in -5.0f64..5.0, im in 0.1f64..5.0) {
            let p = u.to_pair();
            let alpha = flux(alpha);
            let s = SpectralPoint::off_axis(c64(re, im)).unwrap();
            let left = krein_matrix(&p, alpha, &s).unwrap();
            let right = krein_matrix_right(&p, alpha, &s).unwrap();
            let scale = 1.0 + left.norm();
            prop_assert!((left - right).norm() <= 1e-11 * scale);
            let m = weyl_m(alpha, &s).unwrap().matrix();
            let reduced = -p.reduce().resolvent_block(&m).unwrap();
            prop_assert!((left - reduced).norm() <= 1e-10 * scale);
        }

        #[test]
        fn krein_is_invariant_under_equivalence(u in unitary_strategy(), l in proptest::array::uniform8(-1.0f64..1.0)) {
            let p = u.to_pair();
            let l = Mat2::new(c64(l[0], l[1]), c64(l[2], l[3]), c64(l[4], l[5]), c64(l[6], l[7])) + Mat2::identity() * c64(2.0, 0.0);
            let q = p.left_multiplied(&l).unwrap();
            let s = SpectralPoint::off_axis(c64(0.0, 1.0)).unwrap();
            let a = krein_matrix(&p, flux(0.4), &s).unwrap();
            let b = krein_matrix(&q, flux(0.4), &s).unwrap();
            prop_assert!((a - b).norm() <= 1e-11 * (1.0 + a.norm()));
        }
    }
}
