//! Closed-form helpers for 2x2 complex matrices.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;
pub type Vec2 = Vector2<Complex64>;

/// Below this ratio `|det M| / |M|_F^2` a 2x2 solve is refused.
pub const SOLVE_CONDITION_LIMIT: f64 = 1e-14;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn diag(a: Complex64, b: Complex64) -> Mat2 {
    Mat2::new(a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), b)
}

pub fn real_diag(a: f64, b: f64) -> Mat2 {
    diag(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

pub fn scalar(z: Complex64) -> Mat2 {
    diag(z, z)
}

pub fn frobenius(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &Mat2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Inverse by the adjugate formula, refused when
/// `|det| < SOLVE_CONDITION_LIMIT * |M|_F^2`.
pub fn checked_inverse(m: &Mat2) -> Option<Mat2> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let scale = frobenius(m);
    if scale == 0.0 || det.norm() < SOLVE_CONDITION_LIMIT * scale * scale {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// `S* S - 1` in Frobenius norm.
pub fn unitarity_defect(s: &Mat2) -> f64 {
    frobenius(&(s.adjoint() * s - Mat2::identity()))
}

/// Rotate `v` so that its first entry above `1e-12 |v|` is real and positive.
pub fn fix_phase(v: Vec2) -> Vec2 {
    let scale = v.norm();
    for i in 0..2 {
        if v[i].norm() > 1e-12 * scale {
            let phase = v[i].conj() / v[i].norm();
            return v * phase;
        }
    }
    v
}

/// Eigen-decomposition of a Hermitian 2x2 matrix (only the upper triangle
/// and the real diagonal are read). Eigenvalues ascending; eigenvectors
/// orthonormal with the phase convention of [`fix_phase`].
pub fn hermitian_eigen(h: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if radius == 0.0 {
        return ([a, d], [Vec2::new(one, zero), Vec2::new(zero, one)]);
    }
    // Larger-magnitude eigenvalue directly, the other from the determinant.
    let (low, high) = if mean >= 0.0 {
        let high = mean + radius;
        let det = a * d - b.norm_sqr();
        (if high != 0.0 { det / high } else { mean - radius }, high)
    } else {
        let low = mean - radius;
        let det = a * d - b.norm_sqr();
        (low, if low != 0.0 { det / low } else { mean + radius })
    };
    // Eigenvector of [[a, b], [b*, d]] for eigenvalue lambda: either
    // (b, lambda - a) or (lambda - d, b*); take the better conditioned one.
    let vector = |lambda: f64| -> Vec2 {
        let v1 = Vec2::new(b, Complex64::new(lambda - a, 0.0));
        let v2 = Vec2::new(Complex64::new(lambda - d, 0.0), b.conj());
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        fix_phase(v / Complex64::new(v.norm(), 0.0))
    };
    let v_low = vector(low);
    // Orthogonal complement of v_low, so the pair is exactly orthonormal.
    let v_high = fix_phase(Vec2::new(-v_low[1].conj(), v_low[0].conj()));
    ([low, high], [v_low, v_high])
}

/// Singular values of `m`, ascending.
pub fn singular_values(m: &Mat2) -> [f64; 2] {
    let (values, _) = hermitian_eigen(&(m.adjoint() * m));
    [values[0].max(0.0).sqrt(), values[1].max(0.0).sqrt()]
}

/// Right singular vectors of `m`, ordered by ascending singular value, with
/// the singular values.
pub fn right_singular(m: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let (values, vectors) = hermitian_eigen(&(m.adjoint() * m));
    ([values[0].max(0.0).sqrt(), values[1].max(0.0).sqrt()], vectors)
}

/// Nearest unitary matrix (polar factor).
pub fn nearest_unitary(m: &Mat2) -> Mat2 {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    u * v_t
}

/// Orthogonal projection onto the line spanned by `v`.
pub fn projector(v: &Vec2) -> Mat2 {
    let n = v.norm_squared();
    v * v.adjoint() / Complex64::new(n, 0.0)
}
