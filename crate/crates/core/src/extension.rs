//! Boundary pairs `(C, D)`, their equivalence classes, the U(2) labels and
//! the reduction of a pair to a boundary triple on `ker(D)^perp`.

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    checked_inverse, fix_phase, frobenius, hermitian_eigen, is_finite, nearest_unitary, right_singular,
    unitarity_defect, Mat2, Vec2,
};

/// Relative tolerance for the Hermiticity of `C D*`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Relative lower bound on the smallest singular value of `(C | D)`.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Singular values below this fraction of the largest singular value of
/// `(C | D)` count as zero when kernels are computed.
pub const KERNEL_CUTOFF: f64 = 1e-12;
/// Tolerance on `U* U - 1` for unitary labels.
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Relative residual below which two row spaces are declared equal.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// Row-major 2x2 matrix with complex entries written as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntries(pub [[Complex64; 2]; 2]);

impl From<&Mat2> for MatrixEntries {
    fn from(m: &Mat2) -> Self {
        MatrixEntries([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
    }
}

impl From<MatrixEntries> for Mat2 {
    fn from(e: MatrixEntries) -> Self {
        Mat2::new(e.0[0][0], e.0[0][1], e.0[1][0], e.0[1][1])
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawPair {
    c: MatrixEntries,
    d: MatrixEntries,
}

/// An admissible boundary pair: `C D*` Hermitian and `C C* + D D*`
/// invertible. Two pairs related by `(C, D) -> (L C, L D)` with invertible
/// `L` describe the same extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct ExtensionPair {
    c: Mat2,
    d: Mat2,
}

impl TryFrom<RawPair> for ExtensionPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        ExtensionPair::new(raw.c.into(), raw.d.into())
    }
}

impl From<ExtensionPair> for RawPair {
    fn from(p: ExtensionPair) -> Self {
        RawPair { c: (&p.c).into(), d: (&p.d).into() }
    }
}

/// Dimension and orientation of a kernel inside C^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// Trivial kernel (invertible matrix).
    Trivial,
    /// One-dimensional kernel spanned by the unit vector `kernel`;
    /// `complement` spans its orthogonal complement.
    Line { kernel: Vec2, complement: Vec2 },
    /// The whole space (zero matrix).
    Everything,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        match self {
            Kernel::Trivial => 0,
            Kernel::Line { .. } => 1,
            Kernel::Everything => 2,
        }
    }
}

impl ExtensionPair {
    /// Validate a pair. `C D*` must be Hermitian up to
    /// `1e-10 (1 + |C| |D|)` and the smallest singular value of `(C | D)` must
    /// be at least `1e-10` times the largest (Frobenius norms).
    pub fn new(c: Mat2, d: Mat2) -> Result<Self> {
        if !is_finite(&c) || !is_finite(&d) {
            return Err(Error::Admissibility("non-finite matrix entries".into()));
        }
        let cd = c * d.adjoint();
        let skew = frobenius(&(cd - cd.adjoint()));
        let bound = HERMITIAN_TOLERANCE * (1.0 + frobenius(&c) * frobenius(&d));
        if skew > bound {
            return Err(Error::Admissibility(format!("C D* is not Hermitian: |C D* - D C*| = {skew:e}")));
        }
        let (gram, _) = hermitian_eigen(&(c * c.adjoint() + d * d.adjoint()));
        let (small, large) = (gram[0].max(0.0).sqrt(), gram[1].max(0.0).sqrt());
        if large == 0.0 || small < RANK_TOLERANCE * large {
            return Err(Error::Admissibility(format!(
                "(C | D) is rank deficient: singular values {small:e}, {large:e}"
            )));
        }
        Ok(ExtensionPair { c, d })
    }

    /// `(1, 0)`: the Friedrichs extension, i.e. the reference operator.
    pub fn friedrichs() -> Self {
        ExtensionPair { c: Mat2::identity(), d: Mat2::zeros() }
    }

    pub fn c(&self) -> &Mat2 {
        &self.c
    }

    pub fn d(&self) -> &Mat2 {
        &self.d
    }

    /// `(L C, L D)`; `L` must be invertible.
    pub fn left_multiplied(&self, l: &Mat2) -> Result<Self> {
        if checked_inverse(l).is_none() {
            return Err(Error::Conditioning("left factor is not invertible".into()));
        }
        ExtensionPair::new(l * self.c, l * self.d)
    }

    /// Largest singular value of `(C | D)`, the scale of the pair.
    pub fn scale(&self) -> f64 {
        let (gram, _) = hermitian_eigen(&(self.c * self.c.adjoint() + self.d * self.d.adjoint()));
        gram[1].max(0.0).sqrt()
    }

    fn kernel_of(&self, m: &Mat2) -> Kernel {
        let cutoff = KERNEL_CUTOFF * self.scale();
        let (values, vectors) = right_singular(m);
        let largest = values[1];
        // The small singular value via |det| / largest keeps its absolute accuracy.
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
        let smallest = if largest > 0.0 { det / largest } else { 0.0 };
        if largest <= cutoff {
            Kernel::Everything
        } else if smallest <= cutoff {
            Kernel::Line { kernel: fix_phase(vectors[0]), complement: fix_phase(vectors[1]) }
        } else {
            Kernel::Trivial
        }
    }

    /// Kernel of `D`.
    pub fn kernel_d(&self) -> Kernel {
        self.kernel_of(&self.d)
    }

    /// Kernel of `C`.
    pub fn kernel_c(&self) -> Kernel {
        self.kernel_of(&self.c)
    }

    pub fn equivalent_to(&self, other: &ExtensionPair) -> bool {
        pairs_equivalent(self, other)
    }

    pub fn to_unitary(&self) -> UnitaryParam {
        to_unitary(self)
    }

    pub fn reduce(&self) -> TripleReduction {
        reduce_to_triple(self)
    }

    pub fn negative_count(&self) -> usize {
        negative_count(self)
    }
}

/// Validate `(C, D)`; see [`ExtensionPair::new`].
pub fn validate_pair(c: Mat2, d: Mat2) -> Result<ExtensionPair> {
    ExtensionPair::new(c, d)
}

fn stacked(p: &ExtensionPair) -> SMatrix<Complex64, 2, 4> {
    let mut x = SMatrix::<Complex64, 2, 4>::zeros();
    x.fixed_view_mut::<2, 2>(0, 0).copy_from(&p.c);
    x.fixed_view_mut::<2, 2>(0, 2).copy_from(&p.d);
    x
}

/// Whether `(C', D') = L (C, D)` for an invertible `L`, tested as equality of
/// the row spaces of the stacked 2x4 matrices.
pub fn pairs_equivalent(p: &ExtensionPair, q: &ExtensionPair) -> bool {
    let residual = |from: &ExtensionPair, onto: &ExtensionPair| -> f64 {
        let x = stacked(onto);
        let gram = x * x.adjoint();
        let Some(gram_inv) = checked_inverse(&gram) else {
            return f64::INFINITY;
        };
        let projector: Matrix4<Complex64> = x.adjoint() * gram_inv * x;
        let y = stacked(from);
        let r = y - y * projector;
        r.norm() / y.norm()
    };
    residual(q, p) <= EQUIVALENCE_TOLERANCE && residual(p, q) <= EQUIVALENCE_TOLERANCE
}

/// A unitary 2x2 label of an extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixEntries", into = "MatrixEntries")]
pub struct UnitaryParam(Mat2);

impl TryFrom<MatrixEntries> for UnitaryParam {
    type Error = Error;

    fn try_from(e: MatrixEntries) -> Result<Self> {
        UnitaryParam::new(e.into())
    }
}

impl From<UnitaryParam> for MatrixEntries {
    fn from(u: UnitaryParam) -> Self {
        (&u.0).into()
    }
}

impl UnitaryParam {
    pub fn new(u: Mat2) -> Result<Self> {
        if !is_finite(&u) {
            return Err(Error::Domain("non-finite unitary entries".into()));
        }
        let defect = unitarity_defect(&u);
        if defect > UNITARY_TOLERANCE {
            return Err(Error::Domain(format!("matrix is not unitary: |U*U - 1| = {defect:e}")));
        }
        Ok(UnitaryParam(u))
    }

    /// Unitary factor of the Gram-Schmidt orthonormalization of the columns
    /// of `g`; for `g` with i.i.d. complex Gaussian entries the result is
    /// Haar distributed.
    pub fn from_gaussian(g: &Mat2) -> Result<Self> {
        let first = g.column(0).into_owned();
        let n1 = first.norm();
        if n1 == 0.0 {
            return Err(Error::Conditioning("first column vanishes".into()));
        }
        let q1 = first / Complex64::new(n1, 0.0);
        let second = g.column(1).into_owned();
        let rest = second - q1 * q1.dotc(&second);
        let n2 = rest.norm();
        if n2 <= 1e-12 * second.norm() {
            return Err(Error::Conditioning("columns are parallel".into()));
        }
        let q2 = rest / Complex64::new(n2, 0.0);
        UnitaryParam::new(nearest_unitary(&Mat2::from_columns(&[q1, q2])))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn to_pair(&self) -> ExtensionPair {
        from_unitary(self)
    }
}

/// `C = (1 - U)/2`, `D = i (1 + U)/2`.
pub fn from_unitary(u: &UnitaryParam) -> ExtensionPair {
    let one = Mat2::identity();
    let c = (one - u.0) * Complex64::new(0.5, 0.0);
    let d = (one + u.0) * Complex64::new(0.0, 0.5);
    ExtensionPair::new(c, d).expect("pairs built from unitary matrices are admissible")
}

/// `U = -(C - iD)^{-1} (C + iD)`, projected onto U(2) to remove rounding.
///
/// This form is unchanged under `(C, D) -> (L C, L D)` and inverts
/// [`from_unitary`].
pub fn to_unitary(p: &ExtensionPair) -> UnitaryParam {
    let i = Complex64::i();
    let minus = p.c - p.d * i;
    let plus = p.c + p.d * i;
    let inv = checked_inverse(&minus).expect("C - iD is invertible for admissible pairs");
    let u = -(inv * plus);
    UnitaryParam(nearest_unitary(&u))
}

/// Boundary triple on `ker(D)^perp`: dimension `d = 2 - dim ker D`, an
/// isometry `I` onto `ker(D)^perp` and the Hermitian block
/// `L = (D I)^{-1} C I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TripleReduction {
    /// `D = 0`: the extension is the reference operator.
    Empty,
    /// `dim ker D = 1`: `I` is the unit vector `axis` (first nonzero entry
    /// real positive) and `L` the real number `coupling`.
    Line { axis: Vec2, coupling: f64 },
    /// `D` invertible: `I` is the identity and `L = D^{-1} C`.
    Full { coupling: Mat2 },
}

impl TripleReduction {
    pub fn dim(&self) -> usize {
        match self {
            TripleReduction::Empty => 0,
            TripleReduction::Line { .. } => 1,
            TripleReduction::Full { .. } => 2,
        }
    }

    /// `I (P K I - L)^{-1} P` with `P = I*`; equals `(D K - C)^{-1} D` for
    /// the reduced pair.
    pub fn resolvent_block(&self, k: &Mat2) -> Result<Mat2> {
        match self {
            TripleReduction::Empty => Ok(Mat2::zeros()),
            TripleReduction::Line { axis, coupling } => {
                let scalar = axis.dotc(&(k * axis)) - coupling;
                if scalar.norm() == 0.0 {
                    return Err(Error::Conditioning("P K I - L vanishes".into()));
                }
                Ok(axis * axis.adjoint() / scalar)
            }
            TripleReduction::Full { coupling } => {
                checked_inverse(&(k - coupling)).ok_or_else(|| Error::Conditioning("K - L is singular".into()))
            }
        }
    }
}

pub fn reduce_to_triple(p: &ExtensionPair) -> TripleReduction {
    match p.kernel_d() {
        Kernel::Everything => TripleReduction::Empty,
        Kernel::Line { complement, .. } => {
            let di = p.d * complement;
            let ci = p.c * complement;
            let coupling = di.dotc(&ci).re / di.norm_squared();
            TripleReduction::Line { axis: complement, coupling }
        }
        Kernel::Trivial => {
            let d = p.d;
            let det = d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)];
            let d_inv = Mat2::new(d[(1, 1)], -d[(0, 1)], -d[(1, 0)], d[(0, 0)]) / det;
            let a = d_inv * p.c;
            let coupling = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
            TripleReduction::Full { coupling }
        }
    }
}

/// Number of strictly negative eigenvalues of `C D*`; eigenvalues within
/// `1e-12 |(C|D)|^2` of zero count as zero.
pub fn negative_count(p: &ExtensionPair) -> usize {
    let cd = p.c * p.d.adjoint();
    let h = (cd + cd.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, _) = hermitian_eigen(&h);
    let scale = p.scale();
    let threshold = KERNEL_CUTOFF * scale * scale;
    values.iter().filter(|&&v| v < -threshold).count()
}
