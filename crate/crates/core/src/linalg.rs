//! Dense complex linear algebra used by every solver: SVD-based ranks,
//! pseudoinverses, range and kernel bases, Hermitian spectra.
//!
//! Functions suffixed `_with` take an absolute singular-value cutoff. Callers
//! compute it from a [`Tolerance`] and a reference magnitude that reflects the
//! scale of the *problem*, not of the matrix itself; a matrix that is
//! rounding noise around zero must not be promoted to full rank just because
//! its own largest singular value is tiny.

use alloc::vec::Vec;
use nalgebra::DVector;

use crate::error::{KreinError, NoSolutionReason, Result};
use crate::tolerance::Tolerance;
use crate::{CMat, CVec, C64};

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Frobenius norm.
pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of `m - m*`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    fro(&(m - m.adjoint()))
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().copied().fold(C64::new(0.0, 0.0), |a, b| a + b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub(crate) struct Svd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v_t: CMat,
}

pub(crate) fn svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd { u: CMat::zeros(rows, 0), sigma: Vec::new(), v_t: CMat::zeros(0, cols) };
    }
    // nalgebra's bidiagonal SVD occasionally returns factors that do not
    // recompose the input when it is rank deficient; faer's is reliable.
    let s = to_faer(m).svd().expect("SVD of a finite matrix converges");
    let k = rows.min(cols);
    let diag = s.S().column_vector();
    Svd {
        u: CMat::from_fn(rows, k, |i, j| from_faer(s.U()[(i, j)])),
        sigma: (0..k).map(|i| diag[i].re).collect(),
        v_t: CMat::from_fn(k, cols, |i, j| from_faer(s.V()[(j, i)]).conj()),
    }
}

fn to_faer(m: &CMat) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| faer::c64::new(m[(i, j)].re, m[(i, j)].im))
}

fn from_faer(z: faer::c64) -> C64 {
    C64::new(z.re, z.im)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    svd(m).sigma.iter().copied().fold(0.0, f64::max)
}

pub fn rank_with(m: &CMat, cutoff: f64) -> usize {
    svd(m).sigma.iter().filter(|&&s| s > cutoff).count()
}

pub fn pinv_with(m: &CMat, cutoff: f64) -> CMat {
    let (rows, cols) = m.shape();
    let s = svd(m);
    let mut out = CMat::zeros(cols, rows);
    for (k, &sigma) in s.sigma.iter().enumerate() {
        if sigma > cutoff {
            let v = s.v_t.row(k).adjoint();
            let u = s.u.column(k);
            out += (v * u.adjoint()).scale(1.0 / sigma);
        }
    }
    out
}

/// Orthonormal basis of `ran m`.
pub fn range_basis_with(m: &CMat, cutoff: f64) -> CMat {
    let s = svd(m);
    let keep: Vec<usize> = (0..s.sigma.len()).filter(|&k| s.sigma[k] > cutoff).collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| s.u[(i, keep[j])])
}

/// Orthonormal basis of `ker m`.
pub fn null_space_with(m: &CMat, cutoff: f64) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if rows == 0 {
        return CMat::identity(cols, cols);
    }
    // Padding with zero rows makes the SVD return a full set of right
    // singular vectors without changing the kernel.
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let s = svd(&padded);
    let keep: Vec<usize> = (0..s.sigma.len()).filter(|&k| s.sigma[k] <= cutoff).collect();
    CMat::from_fn(cols, keep.len(), |i, j| s.v_t[(keep[j], i)].conj())
}

/// `||(I - A A^+) B||_F`: how far `ran B` sticks out of `ran A`.
pub fn range_residual_with(a: &CMat, b: &CMat, cutoff: f64) -> f64 {
    let q = range_basis_with(a, cutoff);
    fro(&(b - &q * (q.adjoint() * b)))
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMat::zeros(0, 0));
    }
    let e = to_faer(&hermitian_part(m))
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("Hermitian eigendecomposition converges");
    let diag = e.S().column_vector();
    let values = DVector::from_fn(n, |i, _| diag[i].re);
    let vectors = CMat::from_fn(n, n, |i, j| from_faer(e.U()[(i, j)]));
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part; `+inf` for the empty matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    hermitian_eigen(m).0[0]
}

/// Splits `basis` into an orthonormal basis `q_s` of its span and an
/// orthonormal basis `q_perp` of the orthogonal complement.
///
/// Classical Gram-Schmidt with one reorthogonalization pass; the complement is
/// completed greedily from the standard basis, so subspaces spanned by
/// standard basis vectors get the standard frame back exactly.
pub fn orthonormal_frame(basis: &CMat) -> (CMat, CMat) {
    let n = basis.nrows();
    let mut frame: Vec<CVec> = Vec::with_capacity(n);
    for j in 0..basis.ncols() {
        let v = orthogonalize(basis.column(j).into_owned(), &frame);
        let norm = v.norm();
        if norm > 0.0 {
            frame.push(v.unscale(norm));
        }
    }
    let k = frame.len();
    while frame.len() < n {
        let (best, residual) = (0..n)
            .map(|i| {
                let mut e = CVec::zeros(n);
                e[i] = c(1.0);
                orthogonalize(e, &frame)
            })
            .map(|v| {
                let norm = v.norm();
                (v, norm)
            })
            .fold((CVec::zeros(n), -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        frame.push(best.unscale(residual));
    }
    let q_s = CMat::from_fn(n, k, |i, j| frame[j][i]);
    let q_perp = CMat::from_fn(n, n - k, |i, j| frame[k + j][i]);
    (q_s, q_perp)
}

fn orthogonalize(mut v: CVec, frame: &[CVec]) -> CVec {
    for _ in 0..2 {
        for q in frame {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
    }
    v
}

/// Moore-Penrose pseudoinverse with singular values at or below
/// `rank_tol * sigma_max` treated as zero.
pub fn pinv(m: &CMat, tol: &Tolerance) -> CMat {
    pinv_with(m, tol.rank_cutoff(spectral_norm(m)))
}

/// Minimum-norm solution of `A X = B`, which exists iff `ran B ⊆ ran A`.
///
/// The inclusion is accepted when `||(I - A A^+) B|| <= residual_tol * ||B||`.
pub fn solve_douglas(a: &CMat, b: &CMat, tol: &Tolerance) -> Result<CMat> {
    douglas_scaled(a, b, tol, spectral_norm(a), fro(b))
}

/// Douglas solve with explicit reference magnitudes for the rank cutoff of
/// `a` and the residual bound on `b`.
pub(crate) fn douglas_scaled(
    a: &CMat,
    b: &CMat,
    tol: &Tolerance,
    a_reference: f64,
    b_reference: f64,
) -> Result<CMat> {
    if a.nrows() != b.nrows() {
        return Err(KreinError::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
            what: "right-hand side rows",
        });
    }
    let cutoff = tol.rank_cutoff(a_reference);
    let residual = range_residual_with(a, b, cutoff);
    if residual > tol.residual_bound(b_reference) {
        return Err(KreinError::NoSolution(NoSolutionReason::Inconsistent));
    }
    Ok(pinv_with(a, cutoff) * b)
}
