//! Scattering matrix on the two interacting channels.
//!
//! With `b_0 = Gamma(1-alpha) (kappa/2)^alpha`, `b_1 = Gamma(alpha) (kappa/2)^{1-alpha}`,
//! `Phi = diag(e^{-i pi alpha/2}, e^{-i pi (1-alpha)/2})`, `J = diag(1, -1)` and
//! `s = sin(pi alpha)`,
//!
//! `S~(kappa) = 2 i s B Phi (D B^2 Phi^2 + pi/(2 s) C)^{-1} D B Phi J`,
//! `S(kappa) = diag(e^{-i pi alpha}, e^{i pi alpha}) + S~(kappa)`.
//!
//! The direct product is kept as [`s_tilde_direct`]. [`s_matrix`] instead
//! works on the reduced triple and writes `S = Phi W Phi J` with `W` a ratio
//! of short sums of powers of `kappa`, every term scaled by the largest one
//! in log space, so no power of `kappa` is ever formed on its own.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{ExtensionPair, Kernel, MatrixEntries, TripleReduction};
use crate::linalg::{checked_inverse, diag, projector, unitarity_defect, Mat2, Vec2};
use crate::specfun::ln_gamma_abs;
use crate::Flux;

/// Components below this (relative) make a kernel count as a coordinate axis.
pub const ORIENTATION_TOLERANCE: f64 = 1e-10;
/// Components below this but above [`ORIENTATION_TOLERANCE`] raise the
/// near-threshold flag of an asymptotic class.
pub const ORIENTATION_WARNING: f64 = 1e-6;
/// Largest magnitude allowed for a power of `kappa` before the asymptotic
/// limit is returned instead.
pub const SATURATION_BOUND: f64 = 1e300;
/// Largest `|ln kappa|` times the largest exponent accepted by the direct
/// product formula.
const DIRECT_LOG_LIMIT: f64 = 300.0;

/// `delta_m = pi (|m| - |m + alpha|) / 2`.
pub fn ab_phase(m: i64, alpha: Flux) -> f64 {
    0.5 * PI * ((m.abs() as f64) - (m as f64 + alpha.value()).abs())
}

/// Scattering value `e^{2 i delta_m}` of a channel that does not see the
/// boundary condition.
pub fn ab_channel_s(m: i64, alpha: Flux) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * ab_phase(m, alpha))
}

/// `S` at momentum `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix2 {
    pub s: Mat2,
    pub kappa: f64,
    /// The momentum was beyond the representable range and `s` is the
    /// high-energy limit.
    pub saturated: bool,
}

impl ScatteringMatrix2 {
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.s)
    }
}

/// `diag(e^{-i pi alpha}, e^{i pi alpha})`, the scattering matrix of the
/// reference operator.
pub fn reference_s(alpha: Flux) -> Mat2 {
    let a = PI * alpha.value();
    diag(Complex64::from_polar(1.0, -a), Complex64::from_polar(1.0, a))
}

fn ln_b(alpha: Flux, ln_kappa: f64) -> Result<(f64, f64)> {
    let a = alpha.value();
    let ln2 = std::f64::consts::LN_2;
    Ok((
        ln_gamma_abs(1.0 - a)? + a * (ln_kappa - ln2),
        ln_gamma_abs(a)? + (1.0 - a) * (ln_kappa - ln2),
    ))
}

fn phi(alpha: Flux) -> [Complex64; 2] {
    let a = alpha.value();
    [Complex64::from_polar(1.0, -0.5 * PI * a), Complex64::from_polar(1.0, -0.5 * PI * (1.0 - a))]
}

/// `S = Phi W Phi J`.
fn assemble(alpha: Flux, w: &Mat2) -> Mat2 {
    let f = phi(alpha);
    let j = [1.0, -1.0];
    Mat2::from_fn(|r, c| f[r] * w[(r, c)] * f[c] * j[c])
}

/// Terms `coefficient * e^{exponent}` summed after a common rescaling.
struct LogTerms {
    scale: f64,
}

impl LogTerms {
    fn new(terms: &[(Complex64, f64)]) -> Self {
        let scale = terms
            .iter()
            .filter(|(c, _)| c.norm() > 0.0)
            .map(|(c, e)| c.norm().ln() + e)
            .fold(f64::NEG_INFINITY, f64::max);
        LogTerms { scale }
    }

    fn term(&self, c: Complex64, e: f64) -> Complex64 {
        let n = c.norm();
        if n == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        c / n * (n.ln() + e - self.scale).exp()
    }
}

/// `D` invertible, `l = pi/(2 sin(pi alpha)) D^{-1} C`:
/// `W = 1 + 2 i sin(pi alpha) B (B^2 Phi^2 + l)^{-1} B` in closed form.
fn full_rank_w(alpha: Flux, coupling: &Mat2, ln_kappa: f64) -> Result<Mat2> {
    let a = PI * alpha.value();
    let l = coupling * Complex64::new(PI / (2.0 * a.sin()), 0.0);
    let (l11, l22, l12) = (Complex64::new(l[(0, 0)].re, 0.0), Complex64::new(l[(1, 1)].re, 0.0), l[(0, 1)]);
    let det_l = l11 * l22 - l12.norm_sqr();
    let (lb1, lb2) = ln_b(alpha, ln_kappa)?;
    let one = Complex64::new(1.0, 0.0);
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let t = LogTerms::new(&[(det_l, 0.0), (l22, 2.0 * lb1), (l11, 2.0 * lb2), (one, 2.0 * (lb1 + lb2))]);
    let det = t.term(det_l, 0.0);
    let b1_l22 = t.term(l22, 2.0 * lb1);
    let b2_l11 = t.term(l11, 2.0 * lb2);
    let b12 = t.term(one, 2.0 * (lb1 + lb2));
    let off = t.term(l12, lb1 + lb2);
    let den = det + b1_l22 * e(-a) - b2_l11 * e(a) - b12;
    if den.norm() == 0.0 {
        return Err(Error::Conditioning("vanishing denominator in the scattering matrix".into()));
    }
    let shift = e(-a) - e(a);
    Ok(Mat2::new(
        det + b1_l22 * e(a) - b2_l11 * e(a) - b12 * e(2.0 * a),
        off * shift,
        off.conj() * shift,
        det + b1_l22 * e(-a) - b2_l11 * e(-a) - b12 * e(-2.0 * a),
    ) / den)
}

/// `dim ker D = 1` with unit `axis` spanning `ker(D)^perp` and scalar
/// coupling `l`: `W = 1 + 2 i sin(pi alpha) B q q* B / (<q, B^2 Phi^2 q> + pi l/(2 sin(pi alpha)))`.
fn line_w(alpha: Flux, axis: &Vec2, coupling: f64, ln_kappa: f64) -> Result<Mat2> {
    let a = PI * alpha.value();
    let sin = a.sin();
    let ls = Complex64::new(PI / (2.0 * sin) * coupling, 0.0);
    let (w0, w1) = (Complex64::new(axis[0].norm_sqr(), 0.0), Complex64::new(axis[1].norm_sqr(), 0.0));
    let cross = axis[0] * axis[1].conj();
    let (lb1, lb2) = ln_b(alpha, ln_kappa)?;
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let t = LogTerms::new(&[(w0, 2.0 * lb1), (w1, 2.0 * lb2), (ls, 0.0)]);
    let p0 = t.term(w0, 2.0 * lb1);
    let p1 = t.term(w1, 2.0 * lb2);
    let l = t.term(ls, 0.0);
    let off = t.term(cross, lb1 + lb2);
    let gain = Complex64::new(0.0, 2.0 * sin);
    let den = p0 * e(-a) - p1 * e(a) + l;
    if den.norm() == 0.0 {
        return Err(Error::Conditioning("vanishing denominator in the scattering matrix".into()));
    }
    let diff = p0 - p1;
    Ok(Mat2::new(e(a) * diff + l, gain * off, gain * off.conj(), e(-a) * diff + l) / den)
}

/// Threshold on `ln kappa` above which [`s_matrix`] saturates.
pub fn saturation_ln_kappa(alpha: Flux) -> f64 {
    SATURATION_BOUND.ln() / (2.0 * alpha.value().max(alpha.complement()))
}

/// The scattering matrix at momentum `kappa > 0`.
pub fn s_matrix(p: &ExtensionPair, alpha: Flux, kappa: f64) -> Result<ScatteringMatrix2> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("momentum must be positive, got {kappa}")));
    }
    let ln_kappa = kappa.ln();
    if ln_kappa > saturation_ln_kappa(alpha) {
        let class = s_asymptotic(p, alpha, End::Infinity);
        return Ok(ScatteringMatrix2 { s: class.limit, kappa, saturated: true });
    }
    let s = match p.reduce() {
        TripleReduction::Empty => reference_s(alpha),
        TripleReduction::Full { coupling } => assemble(alpha, &full_rank_w(alpha, &coupling, ln_kappa)?),
        TripleReduction::Line { axis, coupling } => assemble(alpha, &line_w(alpha, &axis, coupling, ln_kappa)?),
    };
    Ok(ScatteringMatrix2 { s, kappa, saturated: false })
}

/// `S~(kappa) = S(kappa) - diag(e^{-i pi alpha}, e^{i pi alpha})`.
pub fn s_tilde(p: &ExtensionPair, alpha: Flux, kappa: f64) -> Result<Mat2> {
    Ok(s_matrix(p, alpha, kappa)?.s - reference_s(alpha))
}

/// `S~` from the triple product with explicit powers of `kappa`; restricted
/// to momenta where those powers stay far from overflow.
pub fn s_tilde_direct(p: &ExtensionPair, alpha: Flux, kappa: f64) -> Result<Mat2> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("momentum must be positive, got {kappa}")));
    }
    let a = alpha.value();
    if 2.0 * a.max(1.0 - a) * kappa.ln().abs() > DIRECT_LOG_LIMIT {
        return Err(Error::Domain(format!("momentum {kappa:e} outside the range of the direct formula")));
    }
    let sin = (PI * a).sin();
    let (lb1, lb2) = ln_b(alpha, kappa.ln())?;
    let f = phi(alpha);
    let g = [f[0] * lb1.exp(), f[1] * lb2.exp()];
    let middle = p.d() * diag(g[0] * g[0], g[1] * g[1]) + p.c() * Complex64::new(PI / (2.0 * sin), 0.0);
    let inv = checked_inverse(&middle)
        .ok_or_else(|| Error::Conditioning(format!("singular middle factor at kappa = {kappa:e}")))?;
    Ok(diag(g[0], g[1]) * inv * p.d() * diag(g[0], -g[1]) * Complex64::new(0.0, 2.0 * sin))
}

/// Low- or high-energy end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Zero,
    Infinity,
}

/// Case of the asymptotic classification: `i`-`v` at infinity (by the
/// kernel of `D`), `a`-`e` at zero (by the kernel of `C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    I,
    Ii,
    Iii,
    Iv,
    V,
    A,
    B,
    C,
    D,
    E,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::I => "i",
            CaseLabel::Ii => "ii",
            CaseLabel::Iii => "iii",
            CaseLabel::Iv => "iv",
            CaseLabel::V => "v",
            CaseLabel::A => "a",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
            CaseLabel::D => "d",
            CaseLabel::E => "e",
        }
    }
}

/// Limit of `S` at one end together with the case that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticClass {
    pub end: End,
    pub case: CaseLabel,
    pub limit: Mat2,
    /// The kernel is close to, but not on, a coordinate axis (or the other
    /// way round) so a small perturbation may change the case.
    pub near_threshold: bool,
}

#[derive(Serialize)]
struct AsymptoticRecord {
    end: End,
    case: CaseLabel,
    limit: MatrixEntries,
    near_threshold: bool,
}

impl Serialize for AsymptoticClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AsymptoticRecord { end: self.end, case: self.case, limit: (&self.limit).into(), near_threshold: self.near_threshold }
            .serialize(serializer)
    }
}

/// Which coordinate axis a unit kernel vector lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Axis {
    First,
    Second,
    Neither,
}

fn orientation(kernel: &Vec2) -> (Axis, bool) {
    let (k0, k1) = (kernel[0].norm(), kernel[1].norm());
    let small = k0.min(k1);
    let near = small > 0.0 && small <= ORIENTATION_WARNING;
    if k1 <= ORIENTATION_TOLERANCE {
        (Axis::First, near)
    } else if k0 <= ORIENTATION_TOLERANCE {
        (Axis::Second, near)
    } else {
        (Axis::Neither, near)
    }
}

/// `(2Q - 1) diag(i, -i)`.
fn half_flux_limit(q: &Mat2) -> Mat2 {
    (q * Complex64::new(2.0, 0.0) - Mat2::identity()) * diag(Complex64::i(), -Complex64::i())
}

/// Closed-form limit of `S` at `kappa -> 0` or `kappa -> inf`.
pub fn s_asymptotic(p: &ExtensionPair, alpha: Flux, end: End) -> AsymptoticClass {
    let a = PI * alpha.value();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let mut near_threshold = false;
    let (case, limit) = match end {
        End::Infinity => match p.kernel_d() {
            Kernel::Everything => (CaseLabel::I, diag(e(-a), e(a))),
            Kernel::Trivial => (CaseLabel::Ii, diag(e(a), e(-a))),
            Kernel::Line { kernel, complement } => {
                let (axis, near) = orientation(&kernel);
                near_threshold = near;
                if alpha.is_half() {
                    (CaseLabel::Iii, half_flux_limit(&projector(&complement)))
                } else if axis == Axis::First || (axis == Axis::Neither && alpha.value() < 0.5) {
                    (CaseLabel::Iv, diag(e(-a), e(-a)))
                } else {
                    (CaseLabel::V, diag(e(a), e(a)))
                }
            }
        },
        End::Zero => match p.kernel_c() {
            Kernel::Everything => (CaseLabel::A, diag(e(a), e(-a))),
            Kernel::Trivial => (CaseLabel::B, diag(e(-a), e(a))),
            Kernel::Line { kernel, complement } => {
                let (axis, near) = orientation(&kernel);
                near_threshold = near;
                if alpha.is_half() {
                    (CaseLabel::C, -half_flux_limit(&projector(&complement)))
                } else if axis == Axis::Second || (axis == Axis::Neither && alpha.value() > 0.5) {
                    (CaseLabel::D, diag(e(-a), e(-a)))
                } else {
                    (CaseLabel::E, diag(e(a), e(a)))
                }
            }
        },
    };
    AsymptoticClass { end, case, limit, near_threshold }
}

/// The constant scattering matrix when `S` does not depend on the energy,
/// which happens exactly when `D = 0`, `C = 0`, the kernels of `C` and `D`
/// are the two coordinate axes, or `alpha = 1/2` with `det C = det D = 0`.
pub fn classify_energy_independent(p: &ExtensionPair, alpha: Flux) -> Option<Mat2> {
    let a = PI * alpha.value();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    match (p.kernel_d(), p.kernel_c()) {
        (Kernel::Everything, _) => Some(reference_s(alpha)),
        (_, Kernel::Everything) => Some(diag(e(a), e(-a))),
        (Kernel::Line { kernel: kd, complement }, Kernel::Line { kernel: kc, .. }) => {
            let (d_axis, _) = orientation(&kd);
            let (c_axis, _) = orientation(&kc);
            if alpha.is_half() {
                Some(half_flux_limit(&projector(&complement)))
            } else if d_axis == Axis::Second && c_axis == Axis::First {
                Some(diag(e(a), e(a)))
            } else if d_axis == Axis::First && c_axis == Axis::Second {
                Some(diag(e(-a), e(-a)))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Both limits and the energy-independence verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub zero: AsymptoticClass,
    pub infinity: AsymptoticClass,
    pub energy_independent: Option<MatrixEntries>,
}

pub fn classify(p: &ExtensionPair, alpha: Flux) -> Classification {
    Classification {
        zero: s_asymptotic(p, alpha, End::Zero),
        infinity: s_asymptotic(p, alpha, End::Infinity),
        energy_independent: classify_energy_independent(p, alpha).map(|m| (&m).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{validate_pair, UnitaryParam};
    use crate::linalg::{c64, frobenius, real_diag};
    use proptest::prelude::*;

    fn flux(a: f64) -> Flux {
        Flux::new(a).unwrap()
    }

    fn e(x: f64) -> Complex64 {
        Complex64::from_polar(1.0, x)
    }

    #[test]
    fn ab_phase_examples() {
        assert!((ab_phase(0, Flux::half()) + PI / 4.0).abs() < 1e-15);
        assert!((ab_channel_s(0, Flux::half()) - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((ab_phase(-3, flux(0.2)) - 0.1 * PI).abs() < 1e-15);
        for m in -4..4 {
            assert!((ab_channel_s(m, flux(0.37)).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_cases() {
        let alpha = flux(0.3);
        let a = PI * 0.3;
        let f = ExtensionPair::friedrichs();
        let k = validate_pair(Mat2::zeros(), Mat2::identity()).unwrap();
        let u = from_u(real_diag(1.0, -1.0));
        for kappa in [1e-6, 1e-2, 1.0, 1e3, 1e7] {
            assert_eq!(s_tilde(&f, alpha, kappa).unwrap(), Mat2::zeros());
            assert!(frobenius(&(s_matrix(&k, alpha, kappa).unwrap().s - diag(e(a), e(-a)))) < 1e-13);
            assert!(frobenius(&(s_matrix(&u, alpha, kappa).unwrap().s - diag(e(a), e(a)))) < 1e-13);
        }
    }

    fn from_u(u: Mat2) -> ExtensionPair {
        UnitaryParam::new(u).unwrap().to_pair()
    }

    #[test]
    fn half_flux_closed_form() {
        let p = validate_pair(-Mat2::identity(), Mat2::identity()).unwrap();
        let kappa = 2.0 / PI;
        let ratio = c64(-PI / 2.0, 1.0) / c64(-PI / 2.0, -1.0);
        // S = Phi r Phi J with Phi^2 = -i at alpha = 1/2.
        let expected = diag(-Complex64::i() * ratio, Complex64::i() * ratio);
        let s = s_matrix(&p, Flux::half(), kappa).unwrap().s;
        assert!(frobenius(&(s - expected)) < 1e-14, "{s} vs {expected}");
        let direct = s_tilde_direct(&p, Flux::half(), kappa).unwrap();
        let tilde = expected - reference_s(Flux::half());
        assert!(frobenius(&(direct - tilde)) < 1e-12);
    }

    #[test]
    fn asymptotic_examples() {
        let alpha = flux(0.3);
        let a = PI * 0.3;
        let generic = validate_pair(
            Mat2::new(c64(0.3, 0.0), c64(1.0, -2.0), c64(1.0, 2.0), c64(-0.7, 0.0)),
            Mat2::identity(),
        )
        .unwrap();
        let inf = s_asymptotic(&generic, alpha, End::Infinity);
        assert_eq!(inf.case, CaseLabel::Ii);
        assert!(frobenius(&(inf.limit - diag(e(a), e(-a)))) < 1e-15);
        let zero = s_asymptotic(&generic, alpha, End::Zero);
        assert_eq!(zero.case, CaseLabel::B);
        assert!(frobenius(&(zero.limit - diag(e(-a), e(a)))) < 1e-15);
        let s = s_matrix(&generic, alpha, 1e300).unwrap();
        assert!(s.saturated);
        assert_eq!(s.s, inf.limit);

        // alpha = 1/2, one-dimensional kernel of D.
        let v = Vec2::new(c64(0.6, 0.0), c64(0.0, 0.8));
        let u = Mat2::identity() - projector(&v) * c64(2.0, 0.0);
        let p = from_u(u);
        let class = s_asymptotic(&p, Flux::half(), End::Infinity);
        assert_eq!(class.case, CaseLabel::Iii);
        let expected = half_flux_limit(&(Mat2::identity() - projector(&v)));
        assert!(frobenius(&(class.limit - expected)) < 1e-14);
        for &m in class.limit.iter() {
            assert!(m.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn energy_independence_examples() {
        let alpha = flux(0.4);
        assert_eq!(classify_energy_independent(&ExtensionPair::friedrichs(), alpha), Some(reference_s(alpha)));
        let p = validate_pair(real_diag(0.0, 1.0), real_diag(1.0, 0.0)).unwrap();
        let constant = classify_energy_independent(&p, Flux::half()).unwrap();
        assert!(frobenius(&(constant - diag(Complex64::i(), Complex64::i()))) < 1e-15);
        for kappa in [1e-3, 1.0, 1e3] {
            let s = s_matrix(&p, Flux::half(), kappa).unwrap().s;
            assert!(frobenius(&(s - constant)) < 1e-12);
        }
        let g = UnitaryParam::from_gaussian(&Mat2::new(c64(0.3, -1.2), c64(0.8, 0.1), c64(-0.4, 0.5), c64(1.1, 0.7)))
            .unwrap()
            .to_pair();
        assert!(classify_energy_independent(&g, flux(0.3)).is_none());
        let diff = s_matrix(&g, flux(0.3), 1.0).unwrap().s - s_matrix(&g, flux(0.3), 10.0).unwrap().s;
        assert!(frobenius(&diff) > 1e-3);
    }

    #[test]
    fn classification_serializes() {
        let c = classify(&ExtensionPair::friedrichs(), flux(0.3));
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["infinity"]["case"], "i");
        assert_eq!(v["zero"]["case"], "b");
        assert!(v["energy_independent"].is_array());
    }

    fn unitary_strategy() -> impl Strategy<Value = UnitaryParam> {
        proptest::array::uniform8(-1.0f64..1.0).prop_filter_map("degenerate sample", |v| {
            let g = Mat2::new(c64(v[0], v[1]), c64(v[2], v[3]), c64(v[4], v[5]), c64(v[6], v[7]));
            UnitaryParam::from_gaussian(&g).ok()
        })
    }

    /// Pairs with a one-dimensional kernel of D: U with eigenvalue -1.
    fn line_strategy() -> impl Strategy<Value = ExtensionPair> {
        (unitary_strategy(), 0.0f64..2.0 * PI).prop_map(|(v, theta)| {
            let v = v.matrix();
            let u = v * diag(c64(-1.0, 0.0), e(theta)) * v.adjoint();
            UnitaryParam::new(crate::linalg::nearest_unitary(&u)).unwrap().to_pair()
        })
    }

    proptest! {
        #[test]
        fn unitarity(u in unitary_strategy(), alpha in 0.02f64..0.98, ln_kappa in -14.0f64..14.0) {
            let s = s_matrix(&u.to_pair(), flux(alpha), ln_kappa.exp()).unwrap();
            prop_assert!(s.unitarity_defect() <= 1e-9);
        }

        #[test]
        fn direct_product_agrees(u in unitary_strategy(), alpha in 0.05f64..0.95, ln_kappa in -4.6f64..4.6) {
            let p = u.to_pair();
            let kappa = ln_kappa.exp();
            let stable = s_tilde(&p, flux(alpha), kappa).unwrap();
            let direct = s_tilde_direct(&p, flux(alpha), kappa).unwrap();
            prop_assert!(frobenius(&(stable - direct)) <= 1e-11 * (1.0 + frobenius(&stable)), "{}", frobenius(&(stable - direct)));
        }

        #[test]
        fn line_path_agrees(p in line_strategy(), alpha in 0.05f64..0.95, ln_kappa in -4.6f64..4.6) {
            let kappa = ln_kappa.exp();
            let stable = s_tilde(&p, flux(alpha), kappa).unwrap();
            let direct = s_tilde_direct(&p, flux(alpha), kappa).unwrap();
            prop_assert!(frobenius(&(stable - direct)) <= 1e-11 * (1.0 + frobenius(&stable)), "{} {} {}", stable, direct, kappa);
        }

        #[test]
        fn line_path_unitarity(p in line_strategy(), alpha in 0.02f64..0.98, ln_kappa in -30.0f64..30.0) {
            let s = s_matrix(&p, flux(alpha), ln_kappa.exp()).unwrap();
            prop_assert!(s.unitarity_defect() <= 1e-9);
        }

        #[test]
        fn continuity(u in unitary_strategy(), alpha in 0.05f64..0.95, ln_kappa in -5.0f64..5.0) {
            let p = u.to_pair();
            let kappa = ln_kappa.exp();
            let s = s_matrix(&p, flux(alpha), kappa).unwrap().s;
            let d1 = frobenius(&(s_matrix(&p, flux(alpha), kappa * (1.0 + 1e-4)).unwrap().s - s));
            let d2 = frobenius(&(s_matrix(&p, flux(alpha), kappa * (1.0 + 2e-4)).unwrap().s - s));
            prop_assert!(d1 < 1e-2);
            if d1 > 1e-12 {
                prop_assert!((d2 / d1 - 2.0).abs() < 1e-2, "ratio {}", d2 / d1);
            }
        }

        #[test]
        fn equivalence_invariance(u in unitary_strategy(), l in proptest::array::uniform8(-1.0f64..1.0), ln_kappa in -5.0f64..5.0) {
            let p = u.to_pair();
            let l = Mat2::new(c64(l[0], l[1]), c64(l[2], l[3]), c64(l[4], l[5]), c64(l[6], l[7])) + Mat2::identity() * c64(2.0, 0.0);
            let q = p.left_multiplied(&l).unwrap();
            let a = s_matrix(&p, flux(0.3), ln_kappa.exp()).unwrap().s;
            let b = s_matrix(&q, flux(0.3), ln_kappa.exp()).unwrap().s;
            prop_assert!(frobenius(&(a - b)) <= 1e-11);
        }

        #[test]
        fn line_axis_phase_does_not_matter(p in line_strategy(), theta in 0.0f64..2.0 * PI, ln_kappa in -5.0f64..5.0) {
            if let TripleReduction::Line { axis, coupling } = p.reduce() {
                let alpha = flux(0.35);
                let ln_k = ln_kappa;
                let a = assemble(alpha, &line_w(alpha, &axis, coupling, ln_k).unwrap());
                let rotated = axis * e(theta);
                let b = assemble(alpha, &line_w(alpha, &rotated, coupling, ln_k).unwrap());
                prop_assert!(frobenius(&(a - b)) <= 1e-13);
            }
        }
    }
}
