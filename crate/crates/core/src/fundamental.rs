//! Fundamental symmetries of a Krein space other than the reference `J`.
//!
//! A fundamental symmetry `Jfs` comes from a decomposition
//! `H = H+ [+] H-` into a maximal uniformly positive subspace and its
//! companion; it is the difference of the two (generally oblique)
//! projections. Its Hilbert inner product is `<x, y>_Jfs = [Jfs x, y]`,
//! with Gram matrix `J Jfs`.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KreinError, Result};
use crate::linalg::{self, fro, hermitian_part, spectral_norm};
use crate::space::SignatureSpace;
use crate::tolerance::Tolerance;
use crate::{instances, CMat};

/// `Jfs^2 = I`, `Jfs` is Krein-selfadjoint, and `J Jfs` is positive definite.
pub fn is_fundamental_symmetry(jfs: &CMat, h: &SignatureSpace, tol: &Tolerance) -> bool {
    let n = h.dim();
    if jfs.shape() != (n, n) {
        return false;
    }
    let size = fro(jfs).max(1.0);
    if fro(&(jfs * jfs - linalg::identity(n))) > tol.residual_bound(size * size) {
        return false;
    }
    let j = h.j();
    if fro(&(j * jfs.adjoint() * j - jfs)) > tol.residual_bound(size) {
        return false;
    }
    if n == 0 {
        return true;
    }
    let gram = j * jfs;
    linalg::min_eigenvalue(&gram) > tol.psd_tol * spectral_norm(&gram)
}

/// Gram matrix `J Jfs` of the inner product induced by `jfs`.
pub fn induced_gram(jfs: &CMat, h: &SignatureSpace) -> CMat {
    hermitian_part(&(h.j() * jfs))
}

/// Upper-triangular `L` with `J Jfs = L* L`: the map `x -> L x` is an
/// isometry from `(C^n, <.,.>_Jfs)` onto `C^n` with the standard product.
pub fn induced_factor(jfs: &CMat, h: &SignatureSpace, tol: &Tolerance) -> Result<CMat> {
    if !is_fundamental_symmetry(jfs, h, tol) {
        return Err(KreinError::InvalidFundamentalSymmetry);
    }
    let chol = Cholesky::new(induced_gram(jfs, h)).ok_or(KreinError::InvalidFundamentalSymmetry)?;
    Ok(chol.l().adjoint())
}

/// A seeded random fundamental symmetry of `h`.
///
/// The maximal positive subspace is drawn as the graph `{(x, K x)}` of a
/// strict contraction `K` in the eigenbasis of `J`; its companion is the
/// graph `{(K* y, y)}`. The symmetry is `P+ - P-` for the direct sum of the
/// two. When `J` is definite, `J` is the only fundamental symmetry and is
/// returned unchanged.
pub fn random_fundamental_symmetry(h: &SignatureSpace, seed: u64) -> CMat {
    let (p, q) = h.inertia();
    if p == 0 || q == 0 {
        return h.j().clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius: f64 = rng.random_range(0.05..0.85);
    let mut k = instances::random_cmatrix(&mut rng, q, p);
    let norm = spectral_norm(&k);
    if norm > 0.0 {
        k.scale_mut(radius / norm);
    }
    let contraction = graph_symmetry(&k);
    let u = positive_first_eigenbasis(h);
    &u * contraction * u.adjoint()
}

/// Fundamental symmetry of the canonical form `diag(I_p, -I_q)` attached to
/// the contraction `k: C^p -> C^q`.
pub fn graph_symmetry(k: &CMat) -> CMat {
    let (q, p) = k.shape();
    let n = p + q;
    let mut frame = linalg::identity(n);
    frame.view_mut((p, 0), (q, p)).copy_from(k);
    frame.view_mut((0, p), (p, q)).copy_from(&k.adjoint());
    let signs = SignatureSpace::canonical(p, q);
    let inverse = frame.clone().try_inverse().expect("graph frame of a strict contraction is invertible");
    frame * signs.j() * inverse
}

/// Unitary `U` with `J = U diag(I_p, -I_q) U*`.
pub fn positive_first_eigenbasis(h: &SignatureSpace) -> CMat {
    let n = h.dim();
    let (values, vectors) = linalg::hermitian_eigen(h.j());
    let mut order: alloc::vec::Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    CMat::from_fn(n, n, |i, j| vectors[(i, order[j])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_signature, rng};
    use crate::linalg::c;

    #[test]
    fn examples() {
        let tol = Tolerance::default();
        let h = SignatureSpace::canonical(1, 1);
        assert!(is_fundamental_symmetry(h.j(), &h, &tol));
        assert!(!is_fundamental_symmetry(&(-h.j()), &h, &tol));
        assert!(!is_fundamental_symmetry(&linalg::identity(2), &h, &tol));
    }

    #[test]
    fn definite_space_has_only_identity() {
        let h = SignatureSpace::hilbert(3);
        for seed in 0..5 {
            assert_eq!(random_fundamental_symmetry(&h, seed), linalg::identity(3));
        }
        let neg = SignatureSpace::canonical(0, 2);
        assert_eq!(random_fundamental_symmetry(&neg, 1), neg.j().clone());
    }

    #[test]
    fn contraction_graph_gives_new_symmetry() {
        let tol = Tolerance::default();
        let k = CMat::from_element(1, 1, c(0.5));
        let jfs = graph_symmetry(&k);
        let h = SignatureSpace::canonical(1, 1);
        assert!(is_fundamental_symmetry(&jfs, &h, &tol));
        assert!(fro(&(jfs - h.j())) > 0.1);
    }

    #[test]
    fn random_symmetries_pass_postcondition() {
        let tol = Tolerance::default();
        let mut r = rng(4);
        for seed in 0..200 {
            let h = random_signature(&mut r, 1 + (seed as usize) % 8);
            let jfs = random_fundamental_symmetry(&h, seed);
            assert!(is_fundamental_symmetry(&jfs, &h, &tol), "seed {seed}");
            assert_eq!(jfs, random_fundamental_symmetry(&h, seed));
            let l = induced_factor(&jfs, &h, &tol).unwrap();
            assert!(fro(&(l.adjoint() * &l - induced_gram(&jfs, &h))) < 1e-10 * fro(&l) * fro(&l));
        }
    }
}
