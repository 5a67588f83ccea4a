//! Complementability and Schur complements (shorted operators), in the
//! Hilbert and Krein settings.
//!
//! For a Hermitian `M` decomposed against `S` as `[[a, b], [b*, c]]`, weak
//! complementability is `ran b ⊆ ran |a|^{1/2}`. In finite dimensions
//! `ran |a|^{1/2} = ran a`, so the test is a plain range inclusion and the
//! shorted matrix is `c - b* a^+ b` on `S^⊥` (zero on `S`).

use crate::error::{KreinError, NoSolutionReason, Result};
use crate::fundamental::induced_factor;
use crate::linalg::{self, fro, hermitian_defect, hermitian_part, spectral_norm};
use crate::space::{hcat, require_selfadjoint, KreinMap, SubspaceBasis};
use crate::tolerance::Tolerance;
use crate::CMat;

/// `M = F [[a, b], [b*, c]] F*` for a unitary frame `F` whose first `k`
/// columns span `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub frame: CMat,
}

impl BlockDecomposition {
    pub fn k(&self) -> usize {
        self.a.nrows()
    }

    pub fn reassemble(&self) -> CMat {
        let k = self.k();
        let n = self.frame.nrows();
        let mut blocks = CMat::zeros(n, n);
        blocks.view_mut((0, 0), (k, k)).copy_from(&self.a);
        blocks.view_mut((0, k), (k, n - k)).copy_from(&self.b);
        blocks.view_mut((k, 0), (n - k, k)).copy_from(&self.b.adjoint());
        blocks.view_mut((k, k), (n - k, n - k)).copy_from(&self.c);
        &self.frame * blocks * self.frame.adjoint()
    }

    fn complement_frame(&self) -> CMat {
        let k = self.k();
        self.frame.columns(k, self.frame.ncols() - k).into_owned()
    }
}

/// Matrix decomposition of a Hermitian `m` with respect to `span(basis)`
/// and its orthogonal complement.
pub fn block_decompose(m: &CMat, basis: &CMat, tol: &Tolerance) -> Result<BlockDecomposition> {
    if !m.is_square() {
        return Err(KreinError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if basis.nrows() != m.nrows() {
        return Err(KreinError::DimensionMismatch {
            expected: m.nrows(),
            found: basis.nrows(),
            what: "subspace basis rows",
        });
    }
    let defect = hermitian_defect(m);
    if defect > tol.residual_bound(fro(m).max(1.0)) {
        return Err(KreinError::NotHermitian { defect });
    }
    let m = hermitian_part(m);
    let (q_s, q_perp) = linalg::orthonormal_frame(basis);
    let a = hermitian_part(&(q_s.adjoint() * &m * &q_s));
    let b = q_s.adjoint() * &m * &q_perp;
    let c = hermitian_part(&(q_perp.adjoint() * &m * &q_perp));
    Ok(BlockDecomposition { a, b, c, frame: hcat(&q_s, &q_perp) })
}

/// `||(I - a a^+) b||` together with the bound it is compared against.
fn weak_residual(d: &BlockDecomposition, scale: f64, tol: &Tolerance) -> (f64, f64) {
    let residual = linalg::range_residual_with(&d.a, &d.b, tol.rank_cutoff(scale));
    (residual, tol.residual_bound(scale))
}

fn check_ambient(w: &KreinMap, s: &SubspaceBasis) -> Result<()> {
    if s.ambient().dim() != w.domain().dim() {
        return Err(KreinError::DimensionMismatch {
            expected: w.domain().dim(),
            found: s.ambient().dim(),
            what: "subspace ambient dimension",
        });
    }
    Ok(())
}

/// `J W` is `S`-weakly complementable: `ran b ⊆ ran a` in its decomposition.
pub fn is_weakly_complementable(w: &KreinMap, s: &SubspaceBasis, tol: &Tolerance) -> Result<bool> {
    require_selfadjoint(w, tol)?;
    check_ambient(w, s)?;
    let m = w.gram();
    let d = block_decompose(&m, s.basis(), tol)?;
    let (residual, bound) = weak_residual(&d, spectral_norm(&m), tol);
    Ok(residual <= bound)
}

/// `H = S + (W S)^[⊥]`, tested as a rank condition on
/// `[basis(S) | basis((W S)^[⊥])]`.
pub fn is_complementable(w: &KreinMap, s: &SubspaceBasis, tol: &Tolerance) -> Result<bool> {
    require_selfadjoint(w, tol)?;
    check_ambient(w, s)?;
    let n = w.domain().dim();
    let (q_s, _) = linalg::orthonormal_frame(s.basis());
    let ws = w.matrix() * &q_s;
    let form = ws.adjoint() * w.codomain().j();
    let reference = spectral_norm(&w.gram());
    let companion = linalg::null_space_with(&form, tol.rank_cutoff(reference));
    let joined = hcat(&q_s, &companion);
    Ok(linalg::rank_with(&joined, tol.rank_cutoff(1.0)) == n)
}

/// Shorted matrix `M_{/S}` of a Hermitian `m`: zero on `S`, `c - b* a^+ b`
/// on `S^⊥`. Its range lies in `S^⊥`.
pub fn hilbert_shorted(m: &CMat, basis: &CMat, tol: &Tolerance) -> Result<CMat> {
    let d = block_decompose(m, basis, tol)?;
    let scale = spectral_norm(m);
    let (residual, bound) = weak_residual(&d, scale, tol);
    if residual > bound {
        return Err(KreinError::NoSolution(NoSolutionReason::NotWeaklyComplementable));
    }
    let a_pinv = linalg::pinv_with(&d.a, tol.rank_cutoff(scale));
    let short = &d.c - d.b.adjoint() * a_pinv * &d.b;
    let q_perp = d.complement_frame();
    Ok(hermitian_part(&(&q_perp * short * q_perp.adjoint())))
}

/// Krein Schur complement `W_{/[S]} = Jfs (Jfs W)_{/S}`, the shorting being
/// taken in the Hilbert space induced by the fundamental symmetry `jfs`.
///
/// The result is Krein-selfadjoint, has range in `S^[⊥]`, and does not depend
/// on the choice of `jfs`.
pub fn krein_schur_complement(
    w: &KreinMap,
    s: &SubspaceBasis,
    jfs: &CMat,
    tol: &Tolerance,
) -> Result<KreinMap> {
    require_selfadjoint(w, tol)?;
    check_ambient(w, s)?;
    let h = w.domain();
    // x -> L x maps <.,.>_Jfs isometrically onto the standard product, where
    // Jfs W becomes the Hermitian L^{-*} (J W) L^{-1}.
    let l = induced_factor(jfs, h, tol)?;
    let l_inv = l.clone().try_inverse().ok_or(KreinError::InvalidFundamentalSymmetry)?;
    let m = hermitian_part(&(l_inv.adjoint() * w.gram() * &l_inv));
    let shorted = hilbert_shorted(&m, &(&l * s.basis()), tol)?;
    KreinMap::on(h, jfs * l_inv * shorted * l)
}
