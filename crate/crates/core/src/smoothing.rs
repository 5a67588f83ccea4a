//! Indefinite smoothing: minimize `[Tx, Tx] + rho [Vx - h0, Vx - h0]`.
//!
//! The problem is an indefinite least squares problem for
//! `K = (T, V): H -> K1 x K2` in the product space with form
//! `[(a1, a2), (b1, b2)]_rho = [a1, b1] + rho [a2, b2]`; it is solvable for
//! every `h0` iff `P = T#T + rho V#V` is Krein-positive and
//! `ran V# ⊆ ran P`. The global solutions are the optimal inverses of `V`
//! for the block weight `diag(T#T, I)`.

use alloc::vec::Vec;

use crate::certificate::SolutionCertificate;
use crate::error::{KreinError, NoSolutionReason, Result};
use crate::ilsq::{OperatorSolution, PointSolution, SolutionSet};
use crate::instances::random_cvector;
use crate::linalg::{self, c, douglas_scaled, fro, spectral_norm};
use crate::oracle::{default_radius, sample_minimality};
use crate::space::{hcat, require_selfadjoint, vcat, KreinMap, SignatureSpace};
use crate::tolerance::Tolerance;
use crate::{instances, is_fundamental_symmetry, CMat, CVec};

/// Seeded samples behind the order and minimality certificates.
pub const CERTIFICATE_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingInstance {
    t: KreinMap,
    v: KreinMap,
    rho: f64,
    tol: Tolerance,
}

/// `K1 x K2` with the form `[., .]_rho`.
///
/// Its Gram matrix `diag(J1, rho J2)` is not an involution when
/// `|rho| != 1`. The same form is `[W_rho a, b]` for the signature
/// `diag(J1, sign(rho) J2)` and `W_rho = diag(I, |rho| I)`, which is how the
/// product space plugs into the least squares machinery.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSpace {
    first: SignatureSpace,
    second: SignatureSpace,
    rho: f64,
}

impl AugmentedSpace {
    pub fn new(first: SignatureSpace, second: SignatureSpace, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(AugmentedSpace { first, second, rho })
    }

    pub fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `diag(J1, rho J2)`.
    pub fn gram(&self) -> CMat {
        block_diag(self.first.j(), &(self.second.j() * c(self.rho)))
    }

    /// `[a, b]_rho = b* diag(J1, rho J2) a`.
    pub fn form(&self, a: &CVec, b: &CVec) -> crate::C64 {
        b.dotc(&(self.gram() * a))
    }

    /// `diag(J1, sign(rho) J2)`.
    pub fn signature(&self) -> SignatureSpace {
        let sign = if self.rho > 0.0 { 1.0 } else { -1.0 };
        let j = block_diag(self.first.j(), &(self.second.j() * c(sign)));
        let (p1, q1) = self.first.inertia();
        let (p2, q2) = self.second.inertia();
        let inertia = if sign > 0.0 { (p1 + p2, q1 + q2) } else { (p1 + q2, q1 + p2) };
        SignatureSpace::from_parts(j, inertia)
    }

    /// `diag(I, |rho| I)` on [`AugmentedSpace::signature`].
    pub fn identity_weight(&self) -> KreinMap {
        let n1 = self.first.dim();
        let m = CMat::from_fn(self.dim(), self.dim(), |i, k| {
            if i != k {
                c(0.0)
            } else if i < n1 {
                c(1.0)
            } else {
                c(self.rho.abs())
            }
        });
        KreinMap::on(&self.signature(), m).expect("square")
    }
}

/// `K h = (T h, V h)` together with its adjoint for `[., .]_rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    pub k: KreinMap,
    pub space: AugmentedSpace,
    /// `K#(a1, a2) = T# a1 + rho V# a2`.
    pub k_sharp: CMat,
}

impl Augmented {
    /// `B0' = (0, B0)`, mapping into the second slot.
    pub fn lift(&self, b0: &CMat) -> CMat {
        vcat(&CMat::zeros(self.space.first.dim(), b0.ncols()), b0)
    }

    /// Adjoint of a lifted map for `[., .]_rho` on the codomain and the
    /// signature `j_domain` on its domain: `rho B0#` on the second slot.
    pub fn lift_sharp(&self, b0: &CMat, j_domain: &CMat) -> CMat {
        j_domain * self.lift(b0).adjoint() * self.space.gram()
    }
}

/// `W = [[W11, W12], [W12#, W22]]` on `H x K`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockWeight {
    w11: KreinMap,
    w12: KreinMap,
    w22: KreinMap,
}

impl BlockWeight {
    /// `W11` on `H`, `W22` on `K` and `W12: K -> H`. The assembled weight
    /// must be selfadjoint for `[., .]_rho`; with off-diagonal blocks
    /// `W12, W12#` that forces `W12 = 0` unless `rho = 1`.
    pub fn new(w11: KreinMap, w12: KreinMap, w22: KreinMap, rho: f64, tol: &Tolerance) -> Result<Self> {
        check_rho(rho)?;
        require_selfadjoint(&w11, tol)?;
        require_selfadjoint(&w22, tol)?;
        if w12.codomain().dim() != w11.domain().dim() || w12.domain().dim() != w22.domain().dim() {
            return Err(KreinError::DimensionMismatch {
                expected: w11.domain().dim(),
                found: w12.codomain().dim(),
                what: "off-diagonal weight block",
            });
        }
        let defect = fro(w12.matrix()) * (1.0 - rho).abs();
        if defect > tol.residual_bound(1.0 + fro(w11.matrix()) + fro(w22.matrix())) {
            return Err(KreinError::NotSelfadjoint { defect });
        }
        Ok(BlockWeight { w11, w12, w22 })
    }

    /// `diag(W11, W22)`.
    pub fn diagonal(w11: KreinMap, w22: KreinMap, rho: f64, tol: &Tolerance) -> Result<Self> {
        let w12 = KreinMap::zero(w22.domain(), w11.domain());
        Self::new(w11, w12, w22, rho, tol)
    }

    pub fn w11(&self) -> &KreinMap {
        &self.w11
    }

    pub fn w12(&self) -> &KreinMap {
        &self.w12
    }

    pub fn w22(&self) -> &KreinMap {
        &self.w22
    }

    /// The assembled `(n + m) x (n + m)` matrix.
    pub fn assemble(&self) -> CMat {
        let w21 = self.w12.adjoint();
        vcat(&hcat(self.w11.matrix(), self.w12.matrix()), &hcat(w21.matrix(), self.w22.matrix()))
    }
}

/// An optimal inverse, the affine set of all of them, and evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalInverse {
    pub g: KreinMap,
    pub solution_set: SolutionSet,
    pub certificate: SolutionCertificate,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(KreinError::InvalidRho);
    }
    Ok(())
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows() + b.nrows();
    let mut out = CMat::zeros(n, n);
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

impl SmoothingInstance {
    pub fn new(t: KreinMap, v: KreinMap, rho: f64, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        check_rho(rho)?;
        if t.domain().dim() != v.domain().dim()
            || fro(&(t.domain().j() - v.domain().j())) > tol.residual_bound(1.0)
        {
            return Err(KreinError::DimensionMismatch {
                expected: t.domain().dim(),
                found: v.domain().dim(),
                what: "T and V must act on the same Krein space",
            });
        }
        Ok(SmoothingInstance { t, v, rho, tol })
    }

    pub fn t(&self) -> &KreinMap {
        &self.t
    }

    pub fn v(&self) -> &KreinMap {
        &self.v
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    pub fn space(&self) -> &SignatureSpace {
        self.t.domain()
    }

    /// `T#T + rho V#V`.
    pub fn normal_operator(&self) -> KreinMap {
        let tt = self.t.adjoint().matrix() * self.t.matrix();
        let vv = self.v.adjoint().matrix() * self.v.matrix();
        KreinMap::on(self.space(), tt + vv * c(self.rho)).expect("square")
    }

    /// Natural magnitude of the normal operator.
    pub fn scale(&self) -> f64 {
        let t = spectral_norm(self.t.matrix());
        let v = spectral_norm(self.v.matrix());
        t * t + self.rho.abs() * v * v
    }

    /// Smallest eigenvalue of `J P`, relative to the problem scale.
    pub fn positivity_margin(&self) -> f64 {
        let gram = linalg::hermitian_part(&self.normal_operator().gram());
        relative(linalg::min_eigenvalue(&gram), self.scale())
    }

    /// `[Tx, Tx] + rho [Vx - h0, Vx - h0]`.
    pub fn objective(&self, h0: &CVec, x: &CVec) -> f64 {
        let tx = self.t.matrix() * x;
        let r = self.v.matrix() * x - h0;
        self.t.codomain().form(&tx, &tx).re + self.rho * self.v.codomain().form(&r, &r).re
    }

    /// `tr_J((TX)# TX) + rho tr_J((VX - B0)# (VX - B0))` for a fundamental
    /// symmetry `jfs` of the domain `e` of `X`.
    pub fn operator_objective(&self, b0: &CMat, x: &CMat, e: &SignatureSpace, jfs: &CMat) -> f64 {
        linalg::trace(&(jfs * self.operator_value(b0, x, e))).re
    }

    /// `(TX)# TX + rho (VX - B0)# (VX - B0)`, an operator on `e`.
    fn operator_value(&self, b0: &CMat, x: &CMat, e: &SignatureSpace) -> CMat {
        let tx = self.t.matrix() * x;
        let r = self.v.matrix() * x - b0;
        let first = e.j() * tx.adjoint() * self.t.codomain().j() * &tx;
        let second = e.j() * r.adjoint() * self.v.codomain().j() * &r;
        first + second * c(self.rho)
    }

    fn v_sharp(&self) -> CMat {
        self.v.adjoint().into_matrix()
    }

    fn solve_normal(&self, rhs: &CMat, rhs_reference: f64) -> Result<CMat> {
        douglas_scaled(
            self.normal_operator().matrix(),
            rhs,
            &self.tol,
            self.scale(),
            rhs_reference.max(fro(rhs)),
        )
    }

    fn require_positive(&self) -> Result<f64> {
        let margin = self.positivity_margin();
        if margin < -self.tol.psd_tol {
            return Err(KreinError::NoSolution(NoSolutionReason::NotPositive));
        }
        Ok(margin)
    }
}

fn relative(lambda: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        lambda / scale
    } else {
        0.0_f64.min(lambda)
    }
}

pub fn build_augmented(inst: &SmoothingInstance) -> Augmented {
    let space = AugmentedSpace::new(inst.t.codomain().clone(), inst.v.codomain().clone(), inst.rho)
        .expect("rho validated by the instance");
    let k = KreinMap::new(vcat(inst.t.matrix(), inst.v.matrix()), inst.space().clone(), space.signature())
        .expect("stacked rows match the product space");
    let k_sharp = hcat(inst.t.adjoint().matrix(), &(inst.v_sharp() * c(inst.rho)));
    Augmented { k, space, k_sharp }
}

/// `P = T#T + rho V#V` is Krein-positive and `ran V# ⊆ ran P`.
pub fn smoothing_feasible(inst: &SmoothingInstance) -> bool {
    if inst.positivity_margin() < -inst.tol.psd_tol {
        return false;
    }
    let v_norm = spectral_norm(inst.v.matrix());
    let residual = linalg::range_residual_with(
        inst.normal_operator().matrix(),
        &inst.v_sharp(),
        inst.tol.rank_cutoff(inst.scale()),
    );
    residual <= inst.tol.residual_bound(v_norm.max(1e-300))
}

/// `ran K` is nonnegative for `[., .]_rho`, tested on an orthonormal basis
/// of `ran K` with the Gram `diag(J1, rho J2)`.
pub fn range_k_nonnegative(inst: &SmoothingInstance) -> bool {
    let aug = build_augmented(inst);
    let k = aug.k.matrix();
    let basis = linalg::range_basis_with(k, inst.tol.rank_cutoff(spectral_norm(k)));
    if basis.ncols() == 0 {
        return true;
    }
    let gram = aug.space.gram();
    let compressed = linalg::hermitian_part(&(basis.adjoint() * &gram * &basis));
    let scale = spectral_norm(&gram);
    linalg::min_eigenvalue(&compressed) >= -inst.tol.psd_tol * scale
}

/// Minimum-norm solution of `P x = rho V# h0` and the value
/// `[Tx0, Tx0] + rho [Vx0 - h0, Vx0 - h0]`.
pub fn solve_smoothing_point(inst: &SmoothingInstance, h0: &CVec) -> Result<PointSolution> {
    let m = inst.v.codomain().dim();
    if h0.len() != m {
        return Err(KreinError::DimensionMismatch { expected: m, found: h0.len(), what: "h0" });
    }
    let margin = inst.require_positive()?;
    let rhs = inst.v_sharp() * h0 * c(inst.rho);
    let reference = inst.rho.abs() * spectral_norm(inst.v.matrix()) * h0.norm();
    let x = inst.solve_normal(&CMat::from_column_slice(rhs.len(), 1, rhs.as_slice()), reference)?;
    let u = x.column(0).into_owned();
    let value = inst.objective(h0, &u);
    let certificate = SolutionCertificate {
        normal_residual: Some((inst.normal_operator().matrix() * &u - &rhs).norm()),
        min_eigenvalue: Some(margin),
        ..SolutionCertificate::solved()
    };
    Ok(PointSolution { u, value, certificate })
}

/// Minimum-norm solution of
/// `(W11 + W12 A + rho A# W12# + rho A# W22 A) X = W12 + rho A# W22`.
///
/// `G h` minimizes `[W (x, Ax - h), (x, Ax - h)]_rho` over `x` for every
/// `h`; the certificate records the worst sampled margin of that claim.
pub fn optimal_inverse(a: &KreinMap, w: &BlockWeight, rho: f64, tol: &Tolerance) -> Result<OptimalInverse> {
    check_rho(rho)?;
    tol.validate()?;
    let h = a.domain();
    let k = a.codomain();
    if w.w11.domain().dim() != h.dim() || w.w22.domain().dim() != k.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: h.dim() + k.dim(),
            found: w.w11.domain().dim() + w.w22.domain().dim(),
            what: "block weight vs H x K",
        });
    }
    let a_sharp = a.adjoint().into_matrix();
    let am = a.matrix();
    let (w11, w12, w22) = (w.w11.matrix(), w.w12.matrix(), w.w22.matrix());
    let w21 = w.w12.adjoint().into_matrix();
    let coefficient = w11 + w12 * am + &a_sharp * &w21 * c(rho) + &a_sharp * w22 * am * c(rho);
    let rhs = w12 + &a_sharp * w22 * c(rho);

    let an = spectral_norm(am);
    let n11 = spectral_norm(w11);
    let n12 = spectral_norm(w12);
    let n22 = spectral_norm(w22);
    let scale = n11 + (1.0 + rho.abs()) * n12 * an + rho.abs() * n22 * an * an;
    let gram = linalg::hermitian_part(&(h.j() * &coefficient));
    let margin = relative(linalg::min_eigenvalue(&gram), scale);
    if margin < -tol.psd_tol {
        return Err(KreinError::NoSolution(NoSolutionReason::NotPositive));
    }
    let rhs_reference = n12 + rho.abs() * an * n22;
    let g = douglas_scaled(&coefficient, &rhs, tol, scale, rhs_reference.max(fro(&rhs)))?;
    let kernel = linalg::null_space_with(&coefficient, tol.rank_cutoff(scale));

    // Sampled minimality of h -> G h for the weighted objective.
    let weight = w.assemble();
    let product_gram = block_diag(h.j(), &(k.j() * c(rho)));
    let weighted = linalg::hermitian_part(&(product_gram * weight));
    let objective_at = |hv: &CVec, x: &CVec| {
        let z = vcat(
            &CMat::from_column_slice(x.len(), 1, x.as_slice()),
            &CMat::from_column_slice(hv.len(), 1, (am * x - hv).as_slice()),
        );
        (z.adjoint() * &weighted * &z)[(0, 0)].re
    };
    let mut rng = instances::rng(0x0971);
    let mut worst = f64::INFINITY;
    for seed in 0..10u64 {
        let hv = random_cvector(&mut rng, k.dim());
        let gh = &g * &hv;
        let f = |x: &CVec| objective_at(&hv, x);
        let margin = sample_minimality(&f, &gh, CERTIFICATE_SAMPLES, default_radius(&gh), seed);
        worst = worst.min(margin);
    }

    let certificate = SolutionCertificate {
        normal_residual: Some(fro(&(&coefficient * &g - &rhs))),
        min_eigenvalue: Some(margin),
        worst_margin: Some(worst),
        ..SolutionCertificate::solved()
    };
    let map = KreinMap::new(g.clone(), k.clone(), h.clone())?;
    Ok(OptimalInverse { g: map, solution_set: SolutionSet { particular: g, kernel }, certificate })
}

/// The global smoothing operator: the optimal inverse of `V` for the block
/// weight `diag(T#T, I)`.
pub fn smoothing_global_solution(inst: &SmoothingInstance) -> Result<OptimalInverse> {
    let w11 = inst.t.adjoint().compose(&inst.t)?;
    let w22 = KreinMap::identity(inst.v.codomain());
    let weight = BlockWeight::diagonal(w11, w22, inst.rho, &inst.tol)?;
    optimal_inverse(&inst.v, &weight, inst.rho, &inst.tol)
}

/// Minimizes `tr_J((TX)# TX) + rho tr_J((VX - B0)# (VX - B0))` by solving
/// `P X = rho V# B0`. `jfs` is a fundamental symmetry of the domain of `B0`.
///
/// The certificate's `worst_margin` is the smallest eigenvalue of
/// `J (F(X) - F(X0))` over sampled `X`, where `F(X)` is the operator-valued
/// objective; it is nonnegative when `X0` is a minimum in the Krein order.
pub fn operator_smoothing_min(inst: &SmoothingInstance, b0: &KreinMap, jfs: &CMat) -> Result<OperatorSolution> {
    let m = inst.v.codomain().dim();
    if b0.codomain().dim() != m {
        return Err(KreinError::DimensionMismatch {
            expected: m,
            found: b0.codomain().dim(),
            what: "codomain of B0 vs codomain of V",
        });
    }
    let e = b0.domain();
    if !is_fundamental_symmetry(jfs, e, &inst.tol) {
        return Err(KreinError::InvalidFundamentalSymmetry);
    }
    let margin = inst.require_positive()?;
    let rhs = inst.v_sharp() * b0.matrix() * c(inst.rho);
    let reference = inst.rho.abs() * spectral_norm(inst.v.matrix()) * spectral_norm(b0.matrix());
    let x0 = inst.solve_normal(&rhs, reference)?;
    let value = inst.operator_objective(b0.matrix(), &x0, e, jfs);

    let base = inst.operator_value(b0.matrix(), &x0, e);
    let n = inst.space().dim();
    let mut rng = instances::rng(0x7e02);
    let radius = 1.0 + fro(&x0);
    let mut worst = f64::INFINITY;
    let scale = inst.scale() * radius * radius + inst.rho.abs() * fro(b0.matrix()) * fro(b0.matrix());
    let samples: Vec<CMat> = (0..CERTIFICATE_SAMPLES)
        .map(|i| {
            let step = radius * libm::pow(10.0, -3.0 * (i as f64) / (CERTIFICATE_SAMPLES as f64));
            &x0 + instances::random_cmatrix(&mut rng, n, e.dim()) * c(step / libm::sqrt((n * e.dim()).max(1) as f64))
        })
        .collect();
    for x in &samples {
        let diff = inst.operator_value(b0.matrix(), x, e) - &base;
        let lambda = linalg::min_eigenvalue(&linalg::hermitian_part(&(e.j() * diff)));
        worst = worst.min(relative(lambda, scale));
    }

    let certificate = SolutionCertificate {
        normal_residual: Some(fro(&(inst.normal_operator().matrix() * &x0 - &rhs))),
        min_eigenvalue: Some(margin),
        worst_margin: Some(worst),
        ..SolutionCertificate::solved()
    };
    let x0 = KreinMap::new(x0, e.clone(), inst.space().clone())?;
    Ok(OperatorSolution { x0, value, certificate })
}

/// `DF(X)(Y) = 2 Re tr_J(Y# (T#T X + rho V# (VX - B0)))`.
pub fn frechet_derivative(
    inst: &SmoothingInstance,
    b0: &CMat,
    x: &CMat,
    y: &CMat,
    e: &SignatureSpace,
    jfs: &CMat,
) -> f64 {
    let tt = inst.t.adjoint().matrix() * inst.t.matrix();
    let inner = tt * x + inst.v_sharp() * (inst.v.matrix() * x - b0) * c(inst.rho);
    let y_sharp = e.j() * y.adjoint() * inst.space().j();
    2.0 * linalg::trace(&(jfs * y_sharp * inner)).re
}
