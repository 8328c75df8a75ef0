//! Negative eigenvalues of an extension.
//!
//! `z < 0` is an eigenvalue iff `DM(z) - C` is singular. After reduction to
//! the triple on `ker(D)^perp` the condition becomes a zero of an eigenvalue
//! branch of the Hermitian matrix `M(z) - L` (or of the scalar
//! `<q, M(z) q> - l`). The Weyl entries are negative and strictly decreasing
//! in `t = -z`, so every branch falls from its value at `t = 0+` to `-inf`
//! and has a root iff it starts positive. Roots are bracketed and bisected in
//! `ln t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{negative_count, ExtensionPair, TripleReduction};
use crate::linalg::{frobenius, hermitian_eigen, Mat2, Vec2};
use crate::weyl::{gamma_field_profile, weyl_m, weyl_negative_axis, SpectralPoint};
use crate::Flux;

/// Two roots closer than this (relative) form one double eigenvalue.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-10;
/// Distinct roots closer than this (relative) carry a proximity warning.
pub const PROXIMITY_TOLERANCE: f64 = 1e-6;
/// Branches starting within this (relative to `|L|`) of zero at `t = 0+`
/// are treated as starting at zero: they only reach zero at `t = 0`, which
/// is not an eigenvalue.
const ZERO_START: f64 = 1e-12;
/// Initial bracket `t in [1/B, B]`.
const INITIAL_BRACKET: f64 = 1e4;
/// The bracket is widened until `|ln t|` reaches this bound.
const MAX_LN_BRACKET: f64 = 1400.0;

/// A negative eigenvalue with a basis of `ker(DM(z) - C)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub z: f64,
    pub multiplicity: usize,
    pub kernel: Vec<[Complex64; 2]>,
    /// Set when another root lies within [`PROXIMITY_TOLERANCE`] but was not
    /// merged.
    pub proximity_warning: bool,
}

/// `det(D M(z) - C)` for `z < 0`.
pub fn eigenvalue_determinant(p: &ExtensionPair, alpha: Flux, z: f64) -> Result<Complex64> {
    if !(z < 0.0) {
        return Err(Error::Domain(format!("expected z < 0, got {z}")));
    }
    let m = weyl_m(alpha, &SpectralPoint::negative(-z)?)?;
    let mut m = m.matrix();
    // The entries are real on the negative axis; drop rounding residue.
    m[(0, 0)].im = 0.0;
    m[(1, 1)].im = 0.0;
    let a = p.d() * m - p.c();
    Ok(a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)])
}

/// Real diagonal Weyl matrix at `t = e^u`.
fn weyl_at(alpha: Flux, u: f64) -> Result<Mat2> {
    let [m0, m1] = weyl_negative_axis(alpha, u)?;
    Ok(Mat2::new(Complex64::new(m0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(m1, 0.0)))
}

/// A strictly decreasing function of `u = ln t` with a sign change.
fn bisect<F>(f: F, start: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut log = Vec::new();
    let mut half = INITIAL_BRACKET.ln();
    let (mut lo, mut hi);
    loop {
        lo = -half;
        hi = half;
        let (f_lo, f_hi) = (f(lo)?, f(hi)?);
        log.push(format!("[{lo:.1}, {hi:.1}] -> ({f_lo:e}, {f_hi:e})"));
        if f_lo > 0.0 && f_hi < 0.0 {
            break;
        }
        if half >= MAX_LN_BRACKET {
            return Err(Error::RootSearch(format!(
                "no sign change for branch starting at {start:e}; brackets in ln t: {}",
                log.join("; ")
            )));
        }
        half = (half * 2.0).min(MAX_LN_BRACKET);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

struct Root {
    u: f64,
    vector: Vec2,
}

fn branch_roots(reduction: &TripleReduction, alpha: Flux) -> Result<Vec<Root>> {
    match reduction {
        TripleReduction::Empty => Ok(Vec::new()),
        TripleReduction::Line { axis, coupling } => {
            if *coupling >= -ZERO_START {
                return Ok(Vec::new());
            }
            let (w0, w1) = (axis[0].norm_sqr(), axis[1].norm_sqr());
            let u = bisect(
                |u| {
                    let [m0, m1] = weyl_negative_axis(alpha, u)?;
                    Ok(w0 * m0 + w1 * m1 - coupling)
                },
                -coupling,
            )?;
            Ok(vec![Root { u, vector: *axis }])
        }
        TripleReduction::Full { coupling } => {
            let (start, _) = hermitian_eigen(&(-coupling));
            let floor = ZERO_START * frobenius(coupling).max(1.0);
            let mut roots = Vec::new();
            for branch in 0..2 {
                if start[branch] <= floor {
                    continue;
                }
                let u = bisect(
                    |u| {
                        let (values, _) = hermitian_eigen(&(weyl_at(alpha, u)? - coupling));
                        Ok(values[branch])
                    },
                    start[branch],
                )?;
                let (_, vectors) = hermitian_eigen(&(weyl_at(alpha, u)? - coupling));
                roots.push(Root { u, vector: vectors[branch] });
            }
            Ok(roots)
        }
    }
}

/// Negative eigenvalues sorted ascending; the total multiplicity is checked
/// against the number of negative eigenvalues of `C D*`.
pub fn find_negative_eigenvalues(p: &ExtensionPair, alpha: Flux) -> Result<Vec<BoundState>> {
    let mut roots = branch_roots(&p.reduce(), alpha)?;
    // Ascending z means descending t.
    roots.sort_by(|a, b| b.u.total_cmp(&a.u));
    let mut states: Vec<BoundState> = Vec::new();
    for root in roots {
        let z = -root.u.exp();
        if let Some(last) = states.last_mut() {
            let gap = (z - last.z).abs() / z.abs();
            if gap <= MULTIPLICITY_TOLERANCE {
                last.multiplicity += 1;
                last.kernel.push([root.vector[0], root.vector[1]]);
                continue;
            }
            if gap <= PROXIMITY_TOLERANCE {
                last.proximity_warning = true;
                states.push(BoundState { z, multiplicity: 1, kernel: vec![[root.vector[0], root.vector[1]]], proximity_warning: true });
                continue;
            }
        }
        states.push(BoundState { z, multiplicity: 1, kernel: vec![[root.vector[0], root.vector[1]]], proximity_warning: false });
    }
    let total: usize = states.iter().map(|s| s.multiplicity).sum();
    let expected = negative_count(p);
    if total != expected {
        return Err(Error::RootSearch(format!(
            "found total multiplicity {total} but C D* has {expected} negative eigenvalues"
        )));
    }
    Ok(states)
}

/// Radial profile of the eigenfunction with boundary data `xi`, which must
/// lie in the kernel of `D M(z) - C` at the bound state.
pub fn eigenfunction_profile(
    state: &BoundState,
    p: &ExtensionPair,
    alpha: Flux,
    xi: &Vec2,
    r: f64,
) -> Result<[Complex64; 2]> {
    let s = SpectralPoint::negative(-state.z)?;
    let m = weyl_m(alpha, &s)?.matrix();
    let a = p.d() * m - p.c();
    let residual = (a * xi).norm();
    let scale = p.d().norm() * m.norm() + p.c().norm();
    if residual > 1e-9 * scale * xi.norm() {
        return Err(Error::Domain(format!("boundary data is not in the kernel (residual {residual:e})")));
    }
    gamma_field_profile(alpha, &s, xi, r)
}
