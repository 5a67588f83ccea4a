//! Independent checks for the solvers: closed-form minimization of Hermitian
//! quadratic forms, seeded sampling of objectives, and finite differences.
//!
//! Everything here works with plain Hermitian Gram matrices and eigen
//! decompositions. Nothing in this module goes through indefinite adjoints or
//! the SVD-based pseudoinverse used by the solvers it audits.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{KreinError, NoMinimumReason, Result};
use crate::instances::{random_cvector, rng};
use crate::linalg::{self, fro, hermitian_defect, hermitian_eigen};
use crate::tolerance::Tolerance;
use crate::{CMat, CVec, C64};

/// `q(z) = z* M z + 2 Re(v* z) + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub m: CMat,
    pub v: CVec,
    pub c: f64,
    /// Magnitude against which the rank and definiteness of `m` are judged.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMinimum {
    pub argmin: CVec,
    pub value: f64,
}

impl QuadraticForm {
    pub fn new(m: CMat, v: CVec, c: f64) -> Result<Self> {
        let scale = linalg::spectral_norm(&m);
        Self::with_scale(m, v, c, scale)
    }

    pub fn with_scale(m: CMat, v: CVec, c: f64, scale: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(KreinError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if v.len() != m.nrows() {
            return Err(KreinError::DimensionMismatch { expected: m.nrows(), found: v.len(), what: "linear term" });
        }
        let defect = hermitian_defect(&m);
        if defect > 1e-12 * fro(&m).max(1.0) {
            return Err(KreinError::NotHermitian { defect });
        }
        Ok(QuadraticForm { m, v, c, scale })
    }

    pub fn eval(&self, z: &CVec) -> f64 {
        z.dotc(&(&self.m * z)).re + 2.0 * self.v.dotc(z).re + self.c
    }

    /// Reduction of `z -> [G (A z - x), A z - x]` for a Hermitian Gram matrix
    /// `G = J W` of the weighted form.
    pub fn from_residual(a: &CMat, gram: &CMat, x: &CVec) -> Result<Self> {
        let ga = gram * a;
        let m = linalg::hermitian_part(&(a.adjoint() * &ga));
        let v = -(a.adjoint() * (gram * x));
        let c = x.dotc(&(gram * x)).re;
        let an = linalg::spectral_norm(a);
        let scale = an * an * linalg::spectral_norm(gram);
        Self::with_scale(m, v, c, scale)
    }
}

/// Minimizes `q` in closed form.
///
/// A minimum exists iff `M >= 0` and `v ∈ ran M`; then the minimum-norm
/// minimizer is `-M^+ v` and the value is `c - v* M^+ v`.
pub fn quadratic_min(q: &QuadraticForm, tol: &Tolerance) -> Result<QuadraticMinimum> {
    let n = q.m.nrows();
    let (values, vectors) = hermitian_eigen(&q.m);
    if n > 0 && values[0] < tol.psd_floor(q.scale) {
        return Err(KreinError::NoMinimum(NoMinimumReason::Indefinite));
    }
    let coords = vectors.adjoint() * &q.v;
    let cutoff = tol.rank_cutoff(q.scale);
    let mut stray = 0.0;
    let mut argmin = CVec::zeros(n);
    let mut value = q.c;
    for i in 0..n {
        if values[i] > cutoff {
            argmin -= vectors.column(i) * (coords[i] / values[i]);
            value -= coords[i].norm_sqr() / values[i];
        } else {
            stray += coords[i].norm_sqr();
        }
    }
    if libm::sqrt(stray) > tol.residual_bound(q.scale.max(q.v.norm())) {
        return Err(KreinError::NoMinimum(NoMinimumReason::Inconsistent));
    }
    Ok(QuadraticMinimum { argmin, value })
}

/// Default sampling radius around `candidate`.
pub fn default_radius(candidate: &CVec) -> f64 {
    1.0 + candidate.norm()
}

pub const DEFAULT_SAMPLES: usize = 1000;

/// Smallest `objective(sample) - objective(candidate)` over `n_samples`
/// seeded perturbations. A certified minimum has a margin `>= -tol`.
///
/// Perturbations are Gaussian directions of typical length `radius * 10^-3u`
/// with `u` uniform in `[0, 1]`, so both local (first-order) and distant
/// descent directions get probed.
pub fn sample_minimality(
    objective: &dyn Fn(&CVec) -> f64,
    candidate: &CVec,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> f64 {
    let n = candidate.len();
    let base = objective(candidate);
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    let norm = libm::sqrt(n.max(1) as f64);
    for _ in 0..n_samples {
        let u: f64 = rng.random();
        let step = radius * libm::pow(10.0, -3.0 * u);
        let direction = random_cvector(&mut rng, n);
        let sample = candidate + direction * C64::new(step / norm, 0.0);
        worst = worst.min(objective(&sample) - base);
    }
    worst
}

/// [`sample_minimality`] over matrix arguments (flattened column-major).
pub fn sample_minimality_matrix(
    objective: &dyn Fn(&CMat) -> f64,
    candidate: &CMat,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> f64 {
    let (rows, cols) = candidate.shape();
    let flat = CVec::from_iterator(rows * cols, candidate.iter().copied());
    let wrapped = |v: &CVec| objective(&CMat::from_iterator(rows, cols, v.iter().copied()));
    sample_minimality(&wrapped, &flat, n_samples, radius, seed)
}

/// Central difference `(F(X + hY) - F(X - hY)) / 2h`.
pub fn fd_gradient(f: &dyn Fn(&CMat) -> f64, x: &CMat, y: &CMat, step: f64) -> f64 {
    let forward = x + y * C64::new(step, 0.0);
    let backward = x - y * C64::new(step, 0.0);
    (f(&forward) - f(&backward)) / (2.0 * step)
}

/// `Σ [T e_n, e_n]` over an orthonormal basis of `<x, y> = y* G x`,
/// `G = J Jfs`; must equal `tr(Jfs T)`.
pub fn basis_sum_trace(t: &CMat, j: &CMat, jfs: &CMat) -> C64 {
    let (values, vectors) = hermitian_eigen(&(j * jfs));
    let basis: Vec<CVec> = (0..values.len())
        .map(|i| vectors.column(i) * C64::new(1.0 / libm::sqrt(values[i]), 0.0))
        .collect();
    basis.iter().fold(C64::new(0.0, 0.0), |acc, e| acc + e.dotc(&(j * (t * e))))
}
