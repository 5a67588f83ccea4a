//! Indefinite abstract splines: minimize `[Tx, Tx]` subject to `Vx = Vh0`.
//!
//! Pointwise solutions exist iff `T(ker V)` is nonnegative and `T x0` is
//! `[.,.]`-orthogonal to `T(ker V)`; a global solution operator exists iff
//! in addition `T#T` is `ker V`-complementable.

use crate::certificate::SolutionCertificate;
use crate::error::{KreinError, NoMinimumReason, NoSolutionReason, Result};
use crate::ilsq::{check_paths, OperatorSolution};
use crate::linalg::{self, douglas_scaled, fro, spectral_norm};
use crate::oracle::{quadratic_min, QuadraticForm};
use crate::schur::{is_complementable, krein_schur_complement};
use crate::space::{w_nonnegativity_margin, KreinMap, SignatureSpace, SubspaceBasis};
use crate::tolerance::Tolerance;
use crate::{is_fundamental_symmetry, CMat, CVec};

#[derive(Debug, Clone, PartialEq)]
pub struct SplineInstance {
    t: KreinMap,
    v: KreinMap,
    tol: Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplineSolvability {
    /// `T(ker V)` is a nonnegative subspace.
    pub kernel_nonnegative: bool,
    /// `T#T` is `ker V`-complementable.
    pub complementable: bool,
    pub global_exists: bool,
}

/// A pointwise spline and the evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SplinePoint {
    pub x0: CVec,
    pub value: f64,
    pub certificate: SolutionCertificate,
}

impl SplineInstance {
    pub fn new(t: KreinMap, v: KreinMap, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        if t.domain().dim() != v.domain().dim() {
            return Err(KreinError::DimensionMismatch {
                expected: t.domain().dim(),
                found: v.domain().dim(),
                what: "domain of V vs domain of T",
            });
        }
        let defect = fro(&(t.domain().j() - v.domain().j()));
        if defect > tol.residual_bound(1.0) {
            return Err(KreinError::DimensionMismatch {
                expected: t.domain().dim(),
                found: v.domain().dim(),
                what: "T and V must act on the same Krein space",
            });
        }
        Ok(SplineInstance { t, v, tol })
    }

    pub fn t(&self) -> &KreinMap {
        &self.t
    }

    pub fn v(&self) -> &KreinMap {
        &self.v
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    pub fn space(&self) -> &SignatureSpace {
        self.t.domain()
    }

    /// `T#T`, a Krein-selfadjoint operator on `H`.
    pub fn t_sharp_t(&self) -> KreinMap {
        self.t.adjoint().compose(&self.t).expect("T# maps back to H")
    }

    /// Hermitian Gram `T* J T` of `x -> [Tx, Tx]`.
    fn gram(&self) -> CMat {
        linalg::hermitian_part(&(self.t.matrix().adjoint() * self.t.gram()))
    }

    pub fn kernel_v(&self) -> SubspaceBasis {
        SubspaceBasis::kernel_of(self.v.matrix(), self.space(), &self.tol).expect("V acts on H")
    }

    fn v_pinv(&self) -> CMat {
        linalg::pinv_with(self.v.matrix(), self.tol.rank_cutoff(spectral_norm(self.v.matrix())))
    }

    /// Natural magnitude of `T#T`.
    pub fn scale(&self) -> f64 {
        let t = spectral_norm(self.t.matrix());
        t * t
    }

    /// `[Tx, Tx]`.
    pub fn objective(&self, x: &CVec) -> f64 {
        x.dotc(&(self.gram() * x)).re
    }
}

pub fn spline_solvability(inst: &SplineInstance) -> SplineSolvability {
    let tt = inst.t_sharp_t();
    let kernel = inst.kernel_v();
    let kernel_nonnegative =
        w_nonnegativity_margin(&tt, &kernel, &inst.tol).expect("T#T is selfadjoint") >= -inst.tol.psd_tol;
    let complementable = is_complementable(&tt, &kernel, &inst.tol).expect("T#T is selfadjoint");
    SplineSolvability { kernel_nonnegative, complementable, global_exists: kernel_nonnegative && complementable }
}

/// Minimizes `[Tx, Tx]` over `Vx = V h0` by reducing to the free variable
/// `y` in `x = V^+ V h0 + N y`, with `N` an orthonormal basis of `ker V`.
/// Returns the minimum-norm minimizer.
pub fn solve_spline_point(inst: &SplineInstance, h0: &CVec) -> Result<SplinePoint> {
    let n = inst.space().dim();
    if h0.len() != n {
        return Err(KreinError::DimensionMismatch { expected: n, found: h0.len(), what: "h0" });
    }
    let v = inst.v.matrix();
    let particular = inst.v_pinv() * (v * h0);
    let kernel = inst.kernel_v();
    let basis = kernel.basis();
    let gram = inst.gram();
    let q = QuadraticForm::from_residual(basis, &gram, &(-&particular))?;
    let min = quadratic_min(&q, &inst.tol).map_err(|e| match e {
        KreinError::NoMinimum(NoMinimumReason::Indefinite) => KreinError::NoSolution(NoSolutionReason::NotNonnegative),
        KreinError::NoMinimum(NoMinimumReason::Inconsistent) => KreinError::NoSolution(NoSolutionReason::Inconsistent),
        other => other,
    })?;
    let x0 = &particular + basis * &min.argmin;
    let value = inst.objective(&x0);
    let tx0 = inst.t.matrix() * &x0;
    let tn = inst.t.matrix() * basis;
    let certificate = SolutionCertificate {
        constraint_residual: Some((v * &x0 - v * h0).norm()),
        companion_residual: Some((tn.adjoint() * (inst.t.codomain().j() * tx0)).norm()),
        min_eigenvalue: Some(w_nonnegativity_margin(&inst.t_sharp_t(), &kernel, &inst.tol)?),
        ..SolutionCertificate::solved()
    };
    Ok(SplinePoint { x0, value, certificate })
}

/// Minimizes `tr_J(X# T#T X)` over `V X = B0`.
///
/// Solves `P# T#T (P X + V^+ B0) = 0` with `P` the orthogonal projection
/// onto `ker V`, and reports the value both at `X0 = P X + V^+ B0` and as
/// `tr_J((V^+ B0)# (T#T)_{/[ker V]} (V^+ B0))`. The second route is absent
/// when `T#T` is not weakly complementable with respect to `ker V`.
/// `jfs` is a fundamental symmetry of the domain of `B0`.
pub fn operator_spline_min(inst: &SplineInstance, b0: &KreinMap, jfs: &CMat) -> Result<OperatorSolution> {
    let tol = &inst.tol;
    let h = inst.space();
    let v = inst.v.matrix();
    if b0.codomain().dim() != inst.v.codomain().dim() {
        return Err(KreinError::DimensionMismatch {
            expected: inst.v.codomain().dim(),
            found: b0.codomain().dim(),
            what: "codomain of B0 vs codomain of V",
        });
    }
    let e = b0.domain();
    if !is_fundamental_symmetry(jfs, e, tol) {
        return Err(KreinError::InvalidFundamentalSymmetry);
    }
    let v_norm = spectral_norm(v);
    let b_norm = spectral_norm(b0.matrix());
    let residual = linalg::range_residual_with(v, b0.matrix(), tol.rank_cutoff(v_norm));
    if residual > tol.residual_bound(b_norm.max(fro(b0.matrix()))) {
        return Err(KreinError::NoSolution(NoSolutionReason::RangeHypothesisFailed));
    }

    let tt = inst.t_sharp_t();
    let kernel = inst.kernel_v();
    let margin = w_nonnegativity_margin(&tt, &kernel, tol)?;
    if margin < -tol.psd_tol {
        return Err(KreinError::NoSolution(NoSolutionReason::NotNonnegative));
    }
    let p = kernel.projector();
    let p_sharp = h.j() * p.adjoint() * h.j();
    let y0 = inst.v_pinv() * b0.matrix();
    let coefficient = &p_sharp * tt.matrix() * &p;
    let rhs = -(&p_sharp * tt.matrix() * &y0);
    let scale = inst.scale();
    let y_norm = spectral_norm(&y0);
    let x = douglas_scaled(&coefficient, &rhs, tol, scale, (scale * y_norm).max(fro(&rhs)))?;
    let x0 = &p * x + &y0;

    let x0_map = KreinMap::new(x0.clone(), e.clone(), h.clone())?;
    let inner = x0_map.adjoint().matrix() * tt.matrix() * &x0;
    let primary = linalg::trace(&(jfs * inner));
    let secondary = match krein_schur_complement(&tt, &kernel, h.j(), tol) {
        Ok(schur) => {
            let y_map = KreinMap::new(y0.clone(), e.clone(), h.clone())?;
            Some(linalg::trace(&(jfs * (y_map.adjoint().matrix() * schur.matrix() * &y0))))
        }
        Err(KreinError::NoSolution(NoSolutionReason::NotWeaklyComplementable)) => None,
        Err(other) => return Err(other),
    };
    if let Some(secondary) = secondary {
        let x_norm = fro(&x0);
        check_paths(primary, secondary, 1.0 + primary.re.abs() + scale * x_norm * x_norm * fro(jfs))?;
    }
    let certificate = SolutionCertificate {
        normal_residual: Some(fro(&(&coefficient * (&x0 - &y0) - &rhs))),
        min_eigenvalue: Some(margin),
        two_path_values: secondary.map(|s| (primary.re, s.re)),
        constraint_residual: Some(fro(&(v * &x0 - b0.matrix()))),
        ..SolutionCertificate::solved()
    };
    Ok(OperatorSolution { x0: x0_map, value: primary.re, certificate })
}

/// A global spline operator `G` (`G h` solves the pointwise problem for
/// every `h`): the operator solution for `B0 = V`, composed with the
/// orthogonal projection onto `(ker V)^⊥`.
pub fn spline_global_solution(inst: &SplineInstance) -> Result<KreinMap> {
    let h = inst.space();
    let op = operator_spline_min(inst, &inst.v, h.j())?;
    let complement = linalg::identity(h.dim()) - inst.kernel_v().projector();
    KreinMap::on(h, op.x0.matrix() * complement)
}
