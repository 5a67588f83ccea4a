//! Finite-dimensional Krein spaces: a coordinate space `C^n` carrying the
//! indefinite form `[x, y] = y* J x` for a Hermitian involution `J`.
//!
//! Because `J` itself is a fundamental symmetry, the associated Hilbert inner
//! product `[Jx, y]` is the standard one. Other fundamental symmetries are
//! handled explicitly, see [`crate::fundamental`].

use crate::error::{KreinError, Result};
use crate::fundamental::is_fundamental_symmetry;
use crate::linalg::{self, c, fro, hermitian_defect, spectral_norm};
use crate::tolerance::Tolerance;
use crate::{CMat, CVec, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSpace {
    j: CMat,
    inertia: (usize, usize),
}

impl SignatureSpace {
    /// `diag(1, ..., 1, -1, ..., -1)` with `p` positive and `q` negative entries.
    pub fn canonical(p: usize, q: usize) -> Self {
        let j = CMat::from_fn(p + q, p + q, |i, k| {
            if i != k {
                c(0.0)
            } else if i < p {
                c(1.0)
            } else {
                c(-1.0)
            }
        });
        SignatureSpace { j, inertia: (p, q) }
    }

    /// The Hilbert space `C^n` (`J = I`).
    pub fn hilbert(n: usize) -> Self {
        Self::canonical(n, 0)
    }

    /// Trusted constructor for a `j` already known to be a Hermitian
    /// involution with the given inertia.
    pub(crate) fn from_parts(j: CMat, inertia: (usize, usize)) -> Self {
        SignatureSpace { j, inertia }
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn j(&self) -> &CMat {
        &self.j
    }

    /// `(p, q)`: multiplicities of the eigenvalues `+1` and `-1` of `J`.
    pub fn inertia(&self) -> (usize, usize) {
        self.inertia
    }

    /// `[x, y] = y* J x`.
    pub fn form(&self, x: &CVec, y: &CVec) -> C64 {
        y.dotc(&(&self.j * x))
    }
}

/// Accepts `J` as a signature operator iff it is a Hermitian involution.
pub fn validate_signature(j: CMat, tol: &Tolerance) -> Result<SignatureSpace> {
    if !j.is_square() {
        return Err(KreinError::NotSquare { rows: j.nrows(), cols: j.ncols() });
    }
    let n = j.nrows();
    let reference = fro(&j).max(1.0);
    let defect = hermitian_defect(&j);
    if defect > tol.residual_bound(reference) {
        return Err(KreinError::NotHermitian { defect });
    }
    let defect = fro(&(&j * &j - linalg::identity(n)));
    if defect > tol.residual_bound(reference) {
        return Err(KreinError::NotInvolution { defect });
    }
    let (values, _) = linalg::hermitian_eigen(&j);
    let p = values.iter().filter(|&&v| v > 0.0).count();
    Ok(SignatureSpace { j, inertia: (p, n - p) })
}

/// A linear map between two Krein spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinMap {
    matrix: CMat,
    domain: SignatureSpace,
    codomain: SignatureSpace,
}

impl KreinMap {
    pub fn new(matrix: CMat, domain: SignatureSpace, codomain: SignatureSpace) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: domain.dim(),
                found: matrix.ncols(),
                what: "operator columns vs domain",
            });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: codomain.dim(),
                found: matrix.nrows(),
                what: "operator rows vs codomain",
            });
        }
        Ok(KreinMap { matrix, domain, codomain })
    }

    /// An operator from `space` to itself.
    pub fn on(space: &SignatureSpace, matrix: CMat) -> Result<Self> {
        Self::new(matrix, space.clone(), space.clone())
    }

    pub fn identity(space: &SignatureSpace) -> Self {
        KreinMap { matrix: linalg::identity(space.dim()), domain: space.clone(), codomain: space.clone() }
    }

    pub fn zero(domain: &SignatureSpace, codomain: &SignatureSpace) -> Self {
        KreinMap {
            matrix: CMat::zeros(codomain.dim(), domain.dim()),
            domain: domain.clone(),
            codomain: codomain.clone(),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn domain(&self) -> &SignatureSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &SignatureSpace {
        &self.codomain
    }

    pub fn is_square(&self) -> bool {
        self.domain.dim() == self.codomain.dim()
    }

    /// The indefinite adjoint `T#`.
    pub fn adjoint(&self) -> KreinMap {
        indefinite_adjoint(self)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &KreinMap) -> Result<KreinMap> {
        if rhs.codomain.dim() != self.domain.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: self.domain.dim(),
                found: rhs.codomain.dim(),
                what: "composition",
            });
        }
        Ok(KreinMap {
            matrix: &self.matrix * &rhs.matrix,
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    /// `J_cod T`: the Hermitian matrix of the form `[T x, y]` when `T` is
    /// square and Krein-selfadjoint.
    pub fn gram(&self) -> CMat {
        self.codomain.j() * &self.matrix
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(KreinError::NotSquare { rows: self.matrix.nrows(), cols: self.matrix.ncols() })
        }
    }
}

/// `T# = J_dom T* J_cod`, characterized by `[T x, y] = [x, T# y]`.
pub fn indefinite_adjoint(t: &KreinMap) -> KreinMap {
    KreinMap {
        matrix: t.domain.j() * t.matrix.adjoint() * t.codomain.j(),
        domain: t.codomain.clone(),
        codomain: t.domain.clone(),
    }
}

/// `||W - W#||_F`, zero iff `J W` is Hermitian.
pub fn selfadjoint_defect(w: &KreinMap) -> f64 {
    hermitian_defect(&w.gram())
}

pub fn is_krein_selfadjoint(w: &KreinMap, tol: &Tolerance) -> bool {
    w.is_square() && selfadjoint_defect(w) <= tol.residual_bound(fro(w.matrix()).max(1.0))
}

pub(crate) fn require_selfadjoint(w: &KreinMap, tol: &Tolerance) -> Result<()> {
    w.require_square()?;
    if is_krein_selfadjoint(w, tol) {
        Ok(())
    } else {
        Err(KreinError::NotSelfadjoint { defect: selfadjoint_defect(w) })
    }
}

/// Smallest eigenvalue of `J W`, divided by `||J W||_2` (zero for `W = 0`).
pub fn positivity_margin(w: &KreinMap, tol: &Tolerance) -> Result<f64> {
    require_selfadjoint(w, tol)?;
    let gram = w.gram();
    let scale = spectral_norm(&gram);
    let lambda = linalg::min_eigenvalue(&gram);
    Ok(if scale > 0.0 { lambda / scale } else { 0.0_f64.min(lambda) })
}

/// `[W x, x] >= 0` for every `x`.
pub fn is_krein_positive(w: &KreinMap, tol: &Tolerance) -> Result<bool> {
    Ok(positivity_margin(w, tol)? >= -tol.psd_tol)
}

/// Smallest eigenvalue of `B* (J W) B`, relative to `||J W||_2 ||B||_2^2`.
/// `+inf` for the zero subspace.
pub fn w_nonnegativity_margin(w: &KreinMap, s: &SubspaceBasis, tol: &Tolerance) -> Result<f64> {
    require_selfadjoint(w, tol)?;
    if s.ambient.dim() != w.domain.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: w.domain.dim(),
            found: s.ambient.dim(),
            what: "subspace ambient dimension",
        });
    }
    if s.dim() == 0 {
        return Ok(f64::INFINITY);
    }
    let gram = w.gram();
    let compressed = s.basis.adjoint() * &gram * &s.basis;
    let b = spectral_norm(&s.basis);
    let scale = spectral_norm(&gram) * b * b;
    let lambda = linalg::min_eigenvalue(&compressed);
    Ok(if scale > 0.0 { lambda / scale } else { 0.0_f64.min(lambda) })
}

/// `[W s, s] >= 0` for every `s` in `S`.
pub fn is_w_nonnegative_subspace(w: &KreinMap, s: &SubspaceBasis, tol: &Tolerance) -> Result<bool> {
    Ok(w_nonnegativity_margin(w, s, tol)? >= -tol.psd_tol)
}

/// A subspace given by a basis with numerically full column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: CMat,
    ambient: SignatureSpace,
}

impl SubspaceBasis {
    pub fn new(basis: CMat, ambient: &SignatureSpace, tol: &Tolerance) -> Result<Self> {
        if basis.nrows() != ambient.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: ambient.dim(),
                found: basis.nrows(),
                what: "subspace basis rows",
            });
        }
        let cols = basis.ncols();
        let rank = linalg::rank_with(&basis, tol.rank_cutoff(spectral_norm(&basis)));
        if rank < cols {
            return Err(KreinError::NotFullRank { rank, cols });
        }
        Ok(SubspaceBasis { basis, ambient: ambient.clone() })
    }

    /// Orthonormal basis of `ran m`, with the rank cutoff taken relative to
    /// `reference` (typically the natural scale of the problem).
    pub fn range_of_scaled(m: &CMat, ambient: &SignatureSpace, tol: &Tolerance, reference: f64) -> Result<Self> {
        if m.nrows() != ambient.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: ambient.dim(),
                found: m.nrows(),
                what: "operator rows vs ambient space",
            });
        }
        let basis = linalg::range_basis_with(m, tol.rank_cutoff(reference));
        Ok(SubspaceBasis { basis, ambient: ambient.clone() })
    }

    /// Orthonormal basis of `ran m`.
    pub fn range_of(m: &CMat, ambient: &SignatureSpace, tol: &Tolerance) -> Result<Self> {
        Self::range_of_scaled(m, ambient, tol, spectral_norm(m))
    }

    /// Orthonormal basis of `ker m`, for `m` acting on `ambient`.
    pub fn kernel_of_scaled(m: &CMat, ambient: &SignatureSpace, tol: &Tolerance, reference: f64) -> Result<Self> {
        if m.ncols() != ambient.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: ambient.dim(),
                found: m.ncols(),
                what: "operator columns vs ambient space",
            });
        }
        let basis = linalg::null_space_with(m, tol.rank_cutoff(reference));
        Ok(SubspaceBasis { basis, ambient: ambient.clone() })
    }

    pub fn kernel_of(m: &CMat, ambient: &SignatureSpace, tol: &Tolerance) -> Result<Self> {
        Self::kernel_of_scaled(m, ambient, tol, spectral_norm(m))
    }

    pub fn zero(ambient: &SignatureSpace) -> Self {
        SubspaceBasis { basis: CMat::zeros(ambient.dim(), 0), ambient: ambient.clone() }
    }

    pub fn whole(ambient: &SignatureSpace) -> Self {
        SubspaceBasis { basis: linalg::identity(ambient.dim()), ambient: ambient.clone() }
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn ambient(&self) -> &SignatureSpace {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projection (standard geometry) onto the subspace.
    pub fn projector(&self) -> CMat {
        let (q, _) = linalg::orthonormal_frame(&self.basis);
        &q * q.adjoint()
    }
}

/// `S^[⊥] = { h : [h, s] = 0 for all s in S } = ker(B* J)`.
pub fn orthogonal_companion(s: &SubspaceBasis, tol: &Tolerance) -> SubspaceBasis {
    let m = s.basis.adjoint() * s.ambient.j();
    let basis = linalg::null_space_with(&m, tol.rank_cutoff(spectral_norm(&s.basis)));
    SubspaceBasis { basis, ambient: s.ambient.clone() }
}

/// `H = S [+] S^[⊥]`, i.e. `[basis(S) | basis(S^[⊥])]` has full rank.
pub fn is_regular_subspace(s: &SubspaceBasis, tol: &Tolerance) -> bool {
    let n = s.ambient.dim();
    let (q, _) = linalg::orthonormal_frame(&s.basis);
    let companion = orthogonal_companion(s, tol);
    let joined = hcat(&q, companion.basis());
    joined.ncols() >= n && linalg::rank_with(&joined, tol.rank_cutoff(1.0)) == n
}

/// `tr_J(T) = tr(Jfs T)`, the trace of `T` relative to the fundamental
/// symmetry `jfs`.
pub fn j_trace(t: &KreinMap, jfs: &CMat, tol: &Tolerance) -> Result<C64> {
    t.require_square()?;
    if !is_fundamental_symmetry(jfs, t.domain(), tol) {
        return Err(KreinError::InvalidFundamentalSymmetry);
    }
    Ok(linalg::trace(&(jfs * t.matrix())))
}

pub(crate) fn hcat(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub(crate) fn vcat(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}
