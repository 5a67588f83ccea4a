//! Indefinite weighted least squares: minimize `[W(Az - x), Az - x]`.
//!
//! Pointwise solutions exist iff `ran A` is `W`-nonnegative and the normal
//! equation `A#W A u = A#W x` is consistent. Global solutions (indefinite
//! `W`-inverses) are exactly the solutions of `A#W(AX - I) = 0`, and the
//! operator problem attains `tr_J(W_{/[ran A]})`.

use crate::certificate::SolutionCertificate;
use crate::error::{KreinError, NoSolutionReason, Result};
use crate::linalg::{self, douglas_scaled, fro, spectral_norm};
use crate::oracle::{quadratic_min, QuadraticForm};
use crate::schur::krein_schur_complement;
use crate::space::{
    hcat, indefinite_adjoint, is_regular_subspace, require_selfadjoint, w_nonnegativity_margin, KreinMap,
    SubspaceBasis,
};
use crate::tolerance::Tolerance;
use crate::{instances, is_fundamental_symmetry, CMat, CVec, C64};

/// Relative tolerance for agreement of two routes to the same minimum value.
pub const PATH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct IlsqInstance {
    a: KreinMap,
    w: KreinMap,
    tol: Tolerance,
}

/// Solution of a pointwise problem: minimizer and minimum value.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSolution {
    pub u: CVec,
    pub value: f64,
    pub certificate: SolutionCertificate,
}

/// Solution of an operator (J-trace) problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSolution {
    pub x0: KreinMap,
    pub value: f64,
    pub certificate: SolutionCertificate,
}

/// All solutions of a linear operator equation: `particular + kernel * Y`
/// for arbitrary `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub particular: CMat,
    pub kernel: CMat,
}

impl SolutionSet {
    pub fn member(&self, y: &CMat) -> CMat {
        &self.particular + &self.kernel * y
    }

    /// Number of rows of `Y` in [`SolutionSet::member`].
    pub fn freedom(&self) -> usize {
        self.kernel.ncols()
    }
}

/// The four equivalent conditions for the existence of a `W`-inverse,
/// each evaluated along its own route.
#[derive(Debug, Clone, PartialEq)]
pub struct IlsqReport {
    pub ran_a_nonnegative: bool,
    /// (i) a pointwise solution exists for every vector of a basis of `H`.
    pub pointwise_all: bool,
    /// `ran A + [W(ran A)]^[⊥] = H` (rank test, without nonnegativity).
    pub range_sum_full: bool,
    /// `A#W(AX - I) = 0` is solvable (Douglas test, without nonnegativity).
    pub normal_solvable: bool,
    /// (iv) the candidate `G` passes the oracle check at every basis vector.
    pub inverse_exists: bool,
    pub w_inverse: Option<KreinMap>,
    pub solution_set: Option<SolutionSet>,
    pub certificate: SolutionCertificate,
}

impl IlsqReport {
    /// The equivalent existence conditions (i)-(iv) described on the fields.
    pub fn conditions(&self) -> [bool; 4] {
        [
            self.pointwise_all,
            self.range_sum_full && self.ran_a_nonnegative,
            self.normal_solvable && self.ran_a_nonnegative,
            self.inverse_exists,
        ]
    }

    pub fn conditions_agree(&self) -> bool {
        let c = self.conditions();
        c.iter().all(|&b| b == c[0])
    }

    pub fn solvable(&self) -> bool {
        self.normal_solvable && self.ran_a_nonnegative
    }
}

impl IlsqInstance {
    pub fn new(a: KreinMap, w: KreinMap, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        if w.domain().dim() != a.codomain().dim() {
            return Err(KreinError::DimensionMismatch {
                expected: a.codomain().dim(),
                found: w.domain().dim(),
                what: "weight vs codomain of A",
            });
        }
        require_selfadjoint(&w, &tol)?;
        Ok(IlsqInstance { a, w, tol })
    }

    pub fn a(&self) -> &KreinMap {
        &self.a
    }

    pub fn w(&self) -> &KreinMap {
        &self.w
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    /// Natural magnitude of `A#W A`.
    pub fn scale(&self) -> f64 {
        let a = spectral_norm(self.a.matrix());
        a * a * spectral_norm(&self.w.gram())
    }

    fn a_sharp_w(&self) -> CMat {
        indefinite_adjoint(&self.a).matrix() * self.w.matrix()
    }

    fn normal_operator(&self) -> CMat {
        self.a_sharp_w() * self.a.matrix()
    }

    pub fn range_a(&self) -> SubspaceBasis {
        SubspaceBasis::range_of(self.a.matrix(), self.a.codomain(), &self.tol)
            .expect("A maps into its codomain")
    }

    /// Smallest eigenvalue of the compression of `J W` to `ran A`, relative.
    pub fn nonnegativity_margin(&self) -> f64 {
        w_nonnegativity_margin(&self.w, &self.range_a(), &self.tol).expect("validated weight")
    }

    pub fn ran_a_nonnegative(&self) -> bool {
        self.nonnegativity_margin() >= -self.tol.psd_tol
    }

    /// `[W(Az - x), Az - x]` evaluated through the Hermitian Gram `J W`.
    pub fn objective(&self, x: &CVec, z: &CVec) -> f64 {
        let r = self.a.matrix() * z - x;
        r.dotc(&(self.w.gram() * &r)).re
    }

    fn solve_normal(&self, rhs: &CMat, rhs_reference: f64) -> Result<CMat> {
        let rhs_reference = rhs_reference.max(fro(rhs));
        douglas_scaled(&self.normal_operator(), rhs, &self.tol, self.scale(), rhs_reference)
    }
}

/// A `W`-ILSS of `Az = x`: the minimum-norm minimizer and the minimum value.
pub fn solve_ilss_point(inst: &IlsqInstance, x: &CVec) -> Result<PointSolution> {
    let n = inst.a.codomain().dim();
    if x.len() != n {
        return Err(KreinError::DimensionMismatch { expected: n, found: x.len(), what: "data vector" });
    }
    let margin = inst.nonnegativity_margin();
    if margin < -inst.tol.psd_tol {
        return Err(KreinError::NoSolution(NoSolutionReason::NotNonnegative));
    }
    let rhs = inst.a_sharp_w() * x;
    let a_norm = spectral_norm(inst.a.matrix());
    let reference = a_norm * spectral_norm(&inst.w.gram()) * x.norm();
    let u = inst.solve_normal(&CMat::from_column_slice(rhs.len(), 1, rhs.as_slice()), reference)?;
    let u = u.column(0).into_owned();
    let r = inst.a.matrix() * &u - x;
    let value = real_form(&inst.w.gram(), &r);
    let certificate = SolutionCertificate {
        normal_residual: Some((inst.a_sharp_w() * &r).norm()),
        min_eigenvalue: Some(margin),
        ..SolutionCertificate::solved()
    };
    Ok(PointSolution { u, value, certificate })
}

/// `[W r, r]` for a Hermitian Gram `J W`; the imaginary part is rounding.
fn real_form(gram: &CMat, r: &CVec) -> f64 {
    let v = r.dotc(&(gram * r));
    debug_assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs() + fro(gram) * r.norm_squared()));
    v.re
}

/// Evaluates conditions (i)-(iv) independently and, when they hold, returns
/// the minimum-norm `W`-inverse and the affine set of all `W`-inverses.
pub fn analyze_w_inverse(inst: &IlsqInstance) -> IlsqReport {
    let tol = &inst.tol;
    let h = inst.a.codomain();
    let n = h.dim();
    let margin = inst.nonnegativity_margin();
    let nonnegative = margin >= -tol.psd_tol;

    // (i)
    let pointwise_all = (0..n).all(|j| solve_ilss_point(inst, &instances::basis_vector(n, j)).is_ok());

    // (ii): ran A + ker A#W = H.
    let range = inst.range_a();
    let a_sharp_w = inst.a_sharp_w();
    let reference = spectral_norm(inst.a.matrix()) * spectral_norm(&inst.w.gram());
    let kernel = linalg::null_space_with(&a_sharp_w, tol.rank_cutoff(reference));
    let joined = hcat(range.basis(), &kernel);
    let range_sum_full = linalg::rank_with(&joined, tol.rank_cutoff(1.0)) == n;

    // (iii)
    let normal = inst.solve_normal(&a_sharp_w, reference);
    let normal_solvable = normal.is_ok();

    // (iv): every column of the candidate G must attain the closed-form
    // minimum of the Hermitian reduction.
    let candidate = match &normal {
        Ok(g) => g.clone(),
        Err(_) => linalg::pinv_with(&inst.normal_operator(), tol.rank_cutoff(inst.scale())) * &a_sharp_w,
    };
    let inverse_exists = candidate_is_global(inst, &candidate);

    let mut certificate = SolutionCertificate { min_eigenvalue: Some(margin), ..SolutionCertificate::solved() };
    let (w_inverse, solution_set) = match normal {
        Ok(g) if nonnegative => {
            let residual = &a_sharp_w * (inst.a.matrix() * &g - linalg::identity(n));
            certificate.normal_residual = Some(fro(&residual));
            let kernel = linalg::null_space_with(&inst.normal_operator(), tol.rank_cutoff(inst.scale()));
            let map = KreinMap::new(g.clone(), h.clone(), inst.a.domain().clone()).expect("shape of A^T");
            (Some(map), Some(SolutionSet { particular: g, kernel }))
        }
        Ok(_) => {
            certificate.verdict = crate::certificate::Verdict::NoSolution(NoSolutionReason::NotNonnegative);
            (None, None)
        }
        Err(_) => {
            let reason = if nonnegative { NoSolutionReason::Inconsistent } else { NoSolutionReason::NotNonnegative };
            certificate.verdict = crate::certificate::Verdict::NoSolution(reason);
            (None, None)
        }
    };
    IlsqReport {
        ran_a_nonnegative: nonnegative,
        pointwise_all,
        range_sum_full,
        normal_solvable,
        inverse_exists,
        w_inverse,
        solution_set,
        certificate,
    }
}

fn candidate_is_global(inst: &IlsqInstance, g: &CMat) -> bool {
    let n = inst.a.codomain().dim();
    let gram = linalg::hermitian_part(&inst.w.gram());
    (0..n).all(|j| {
        let x = instances::basis_vector(n, j);
        let Ok(q) = QuadraticForm::from_residual(inst.a.matrix(), &gram, &x) else {
            return false;
        };
        let Ok(min) = quadratic_min(&q, &inst.tol) else {
            return false;
        };
        let z = g.column(j).into_owned();
        let attained = q.eval(&z);
        let scale = 1.0 + q.c.abs() + q.scale * (1.0 + z.norm_squared());
        (attained - min.value).abs() <= PATH_TOL * scale
    })
}

/// `min_X tr_J((AX - I)# W (AX - I))`, attained at any `W`-inverse, with the
/// value also computed as `tr_J(W_{/[ran A]})`.
pub fn operator_ilsq_min(inst: &IlsqInstance, jfs: &CMat) -> Result<OperatorSolution> {
    let tol = &inst.tol;
    let h = inst.a.codomain();
    if !is_fundamental_symmetry(jfs, h, tol) {
        return Err(KreinError::InvalidFundamentalSymmetry);
    }
    let n = h.dim();
    let margin = inst.nonnegativity_margin();
    if margin < -tol.psd_tol {
        return Err(KreinError::NoSolution(NoSolutionReason::NotNonnegative));
    }
    let a_sharp_w = inst.a_sharp_w();
    let reference = spectral_norm(inst.a.matrix()) * spectral_norm(&inst.w.gram());
    let x0 = inst.solve_normal(&a_sharp_w, reference)?;

    let residual = KreinMap::on(h, inst.a.matrix() * &x0 - linalg::identity(n))?;
    let weighted = residual.adjoint().matrix() * inst.w.matrix() * residual.matrix();
    let primary = linalg::trace(&(jfs * weighted));
    let schur = krein_schur_complement(&inst.w, &inst.range_a(), jfs, tol)?;
    let secondary = linalg::trace(&(jfs * schur.matrix()));
    let scale = 1.0 + primary.re.abs() + fro(inst.w.matrix()) * (1.0 + fro(&x0) * fro(&x0));
    check_paths(primary, secondary, scale)?;

    let certificate = SolutionCertificate {
        normal_residual: Some(fro(&(&a_sharp_w * residual.matrix()))),
        min_eigenvalue: Some(margin),
        two_path_values: Some((primary.re, secondary.re)),
        ..SolutionCertificate::solved()
    };
    let x0 = KreinMap::new(x0, h.clone(), inst.a.domain().clone())?;
    Ok(OperatorSolution { x0, value: primary.re, certificate })
}

pub(crate) fn check_paths(primary: C64, secondary: C64, scale: f64) -> Result<()> {
    if (primary - secondary).norm() > PATH_TOL * scale {
        return Err(KreinError::PathMismatch { primary: primary.re, secondary: secondary.re });
    }
    Ok(())
}

/// With `W = I`: whenever `A` has an indefinite inverse, `ran A` is regular.
pub fn check_regularity_consequence(inst: &IlsqInstance) -> Result<bool> {
    let n = inst.w.domain().dim();
    if fro(&(inst.w.matrix() - linalg::identity(n))) > inst.tol.residual_bound(1.0) {
        return Err(KreinError::NotIdentityWeight);
    }
    let report = analyze_w_inverse(inst);
    Ok(!report.solvable() || is_regular_subspace(&inst.range_a(), &inst.tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::random_fundamental_symmetry;
    use crate::instances::{ilsq_case, random_cmatrix, random_cvector, rng, CaseKind, CASE_KINDS};
    use crate::linalg::c;
    use crate::oracle::{default_radius, sample_minimality};
    use crate::schur::is_complementable;
    use crate::space::{validate_signature, SignatureSpace};

    fn real(rows: usize, cols: usize, values: &[f64]) -> CMat {
        CMat::from_row_iterator(rows, cols, values.iter().map(|&v| c(v)))
    }

    fn vec2(a: f64, b: f64) -> CVec {
        CVec::from_vec(alloc::vec![c(a), c(b)])
    }

    fn instance(j: &SignatureSpace, a: CMat, w: CMat) -> IlsqInstance {
        let k = SignatureSpace::hilbert(a.ncols());
        let a = KreinMap::new(a, k, j.clone()).unwrap();
        let w = KreinMap::on(j, w).unwrap();
        IlsqInstance::new(a, w, Tolerance::default()).unwrap()
    }

    #[test]
    fn point_examples() {
        let h = SignatureSpace::hilbert(2);
        let e1 = real(2, 1, &[1.0, 0.0]);
        let inst = instance(&h, e1.clone(), linalg::identity(2));
        let s = solve_ilss_point(&inst, &vec2(1.0, 1.0)).unwrap();
        assert!((s.u[0] - c(1.0)).norm() < 1e-14 && (s.value - 1.0).abs() < 1e-14);

        let inst = instance(&h, e1.clone(), real(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let s = solve_ilss_point(&inst, &vec2(2.0, 5.0)).unwrap();
        assert!((s.u[0] - c(2.0)).norm() < 1e-14 && (s.value + 25.0).abs() < 1e-12);

        let inst = instance(&h, e1, real(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        assert_eq!(
            solve_ilss_point(&inst, &vec2(2.0, 5.0)),
            Err(KreinError::NoSolution(NoSolutionReason::NotNonnegative))
        );
    }

    #[test]
    fn analyze_examples() {
        let h = SignatureSpace::hilbert(2);
        let zero = instance(&h, CMat::zeros(2, 1), real(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let r = analyze_w_inverse(&zero);
        assert_eq!(r.conditions(), [true; 4]);
        assert!(fro(r.w_inverse.unwrap().matrix()) == 0.0);

        let e1 = real(2, 1, &[1.0, 0.0]);
        let inst = instance(&h, e1.clone(), real(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let r = analyze_w_inverse(&inst);
        assert_eq!(r.conditions(), [true; 4]);
        assert!(fro(&(r.w_inverse.unwrap().matrix() - real(1, 2, &[1.0, 0.0]))) < 1e-14);

        let inst = instance(&h, e1, real(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        assert_eq!(analyze_w_inverse(&inst).conditions(), [false; 4]);
    }

    #[test]
    fn operator_examples() {
        let h = SignatureSpace::hilbert(2);
        let inst = instance(&h, real(2, 1, &[1.0, 0.0]), real(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let s = operator_ilsq_min(&inst, h.j()).unwrap();
        assert!(fro(&(s.x0.matrix() - real(1, 2, &[1.0, 0.0]))) < 1e-14);
        assert!((s.value + 1.0).abs() < 1e-12);

        let k = SignatureSpace::canonical(1, 1);
        let mut r = rng(21);
        let a = random_cmatrix(&mut r, 2, 2);
        let inst = instance(&k, a, k.j().clone());
        let s = operator_ilsq_min(&inst, k.j()).unwrap();
        assert!(s.value.abs() < 1e-10);

        let w = real(2, 2, &[2.0, 1.0, -1.0, -1.0]);
        let inst = instance(&k, CMat::zeros(2, 1), w.clone());
        for seed in 0..3 {
            let jfs = random_fundamental_symmetry(&k, seed);
            let s = operator_ilsq_min(&inst, &jfs).unwrap();
            assert!(fro(s.x0.matrix()) == 0.0);
            assert!((s.value - linalg::trace(&(&jfs * &w)).re).abs() < 1e-10);
        }
    }

    #[test]
    fn regularity_examples() {
        let tol = Tolerance::default();
        let h = SignatureSpace::canonical(1, 1);
        let e1 = real(2, 1, &[1.0, 0.0]);
        assert!(check_regularity_consequence(&instance(&h, e1.clone(), linalg::identity(2))).unwrap());
        let swap = validate_signature(real(2, 2, &[0.0, 1.0, 1.0, 0.0]), &tol).unwrap();
        let neutral = instance(&swap, e1.clone(), linalg::identity(2));
        let report = analyze_w_inverse(&neutral);
        assert!(report.ran_a_nonnegative && !report.range_sum_full);
        assert_eq!(report.conditions(), [false; 4]);
        assert!(check_regularity_consequence(&neutral).unwrap());
        assert!(check_regularity_consequence(&instance(&h, CMat::zeros(2, 1), linalg::identity(2))).unwrap());
        let weighted = instance(&h, e1, h.j().clone());
        assert_eq!(check_regularity_consequence(&weighted), Err(KreinError::NotIdentityWeight));
    }

    #[test]
    fn four_conditions_agree_on_generated_instances() {
        let mut seen = [0usize; 2];
        for seed in 0..300u64 {
            let kind = CASE_KINDS[seed as usize % CASE_KINDS.len()];
            let inst = ilsq_case(seed, kind);
            let report = analyze_w_inverse(&inst);
            assert!(report.conditions_agree(), "seed {seed} {kind:?}: {:?}", report.conditions());
            seen[report.solvable() as usize] += 1;
            match kind {
                CaseKind::Feasible | CaseKind::FeasibleDegenerate => assert!(report.solvable(), "seed {seed}"),
                CaseKind::InfeasibleNegative | CaseKind::InfeasibleNeutral => {
                    assert!(!report.solvable(), "seed {seed}")
                }
                CaseKind::Random => {}
            }
            if report.solvable() {
                let tol = inst.tol();
                assert!(is_complementable(inst.w(), &inst.range_a(), tol).unwrap());
                let set = report.solution_set.unwrap();
                let mut r = rng(seed);
                let x = set.member(&random_cmatrix(&mut r, set.freedom(), inst.a().codomain().dim()));
                let n = inst.a().codomain().dim();
                let res = inst.a_sharp_w() * (inst.a().matrix() * &x - linalg::identity(n));
                assert!(fro(&res) <= 1e-9 * (1.0 + inst.scale()) * (1.0 + fro(&x)));
            }
        }
        assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
    }

    #[test]
    fn pointwise_solutions_are_minimal() {
        for seed in 0..60u64 {
            let inst = ilsq_case(seed, CASE_KINDS[seed as usize % 2]);
            let n = inst.a().codomain().dim();
            let mut r = rng(1000 + seed);
            let x = random_cvector(&mut r, n);
            let s = solve_ilss_point(&inst, &x).unwrap();
            let f = |z: &CVec| inst.objective(&x, z);
            let margin = sample_minimality(&f, &s.u, 300, default_radius(&s.u), seed);
            assert!(margin >= -1e-8 * (1.0 + s.value.abs()), "seed {seed}: {margin}");
            let report = analyze_w_inverse(&inst);
            let g = report.w_inverse.unwrap();
            let via_g = inst.objective(&x, &(g.matrix() * &x));
            assert!((via_g - s.value).abs() <= 1e-8 * (1.0 + s.value.abs() + x.norm_squared() * inst.scale()));
        }
    }
}
