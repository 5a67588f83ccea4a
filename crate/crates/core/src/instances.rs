//! Seeded random data and engineered problem instances.
//!
//! Feasible instances of the indefinite problems are built directly from
//! their structural characterization (nonnegative subspaces, compatible
//! ranges); rejection sampling almost never lands on them.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, c};
use crate::space::{validate_signature, SignatureSpace};
use crate::tolerance::Tolerance;
use crate::{CMat, CVec, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn random_cvector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_cmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    linalg::hermitian_part(&random_cmatrix(rng, n, n))
}

/// Haar-ish unitary from orthonormalizing a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let (q, rest) = linalg::orthonormal_frame(&random_cmatrix(rng, n, n));
    if rest.ncols() == 0 {
        q
    } else {
        crate::space::hcat(&q, &rest)
    }
}

/// `J = U diag(I_p, -I_q) U*` with `p` uniform in `0..=n` and random unitary `U`.
pub fn random_signature<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SignatureSpace {
    let p = rng.random_range(0..=n);
    rotated_signature(rng, p, n - p)
}

/// Signature with prescribed inertia in a random orthonormal frame.
pub fn rotated_signature<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> SignatureSpace {
    let u = random_unitary(rng, p + q);
    let d = SignatureSpace::canonical(p, q);
    let j = linalg::hermitian_part(&(&u * d.j() * u.adjoint()));
    validate_signature(j, &Tolerance::default()).expect("rotated signature is a Hermitian involution")
}

/// Unit vectors in the `+1` and `-1` eigenspaces of `J`, as matrix columns.
pub fn signature_eigenspaces(h: &SignatureSpace) -> (CMat, CMat) {
    let (p, q) = h.inertia();
    let u = crate::fundamental::positive_first_eigenbasis(h);
    (u.columns(0, p).into_owned(), u.columns(p, q).into_owned())
}

pub(crate) fn scaled(m: CMat, factor: f64) -> CMat {
    m.map(|z| z * factor)
}

pub(crate) fn basis_vector(n: usize, i: usize) -> CVec {
    CVec::from_fn(n, |r, _| c(if r == i { 1.0 } else { 0.0 }))
}

/// Families of engineered instances. The feasible kinds satisfy the
/// existence hypotheses by construction and the infeasible kinds violate
/// them in a specific way; `Random` is unconstrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Feasible,
    FeasibleDegenerate,
    InfeasibleNegative,
    InfeasibleNeutral,
    Random,
}

pub const CASE_KINDS: [CaseKind; 5] = [
    CaseKind::Feasible,
    CaseKind::FeasibleDegenerate,
    CaseKind::InfeasibleNegative,
    CaseKind::InfeasibleNeutral,
    CaseKind::Random,
];

impl CaseKind {
    pub fn expected_feasible(self) -> Option<bool> {
        match self {
            CaseKind::Feasible | CaseKind::FeasibleDegenerate => Some(true),
            CaseKind::InfeasibleNegative | CaseKind::InfeasibleNeutral => Some(false),
            CaseKind::Random => None,
        }
    }
}

fn magnitude<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.5..2.0)
}

/// `U diag(values) U*` with random unitary `U`; also returns `U`, whose
/// columns are eigenvectors in the order of `values`.
pub(crate) fn hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> (CMat, CMat) {
    let u = random_unitary(rng, values.len());
    let d = CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&v| c(v))));
    (linalg::hermitian_part(&(&u * d * u.adjoint())), u)
}

/// Spectrum with `pos` positive, `zero` zero and `neg` negative entries.
fn spectrum<R: Rng + ?Sized>(rng: &mut R, pos: usize, zero: usize, neg: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(pos + zero + neg);
    v.extend((0..pos).map(|_| magnitude(rng)));
    v.extend((0..zero).map(|_| 0.0));
    v.extend((0..neg).map(|_| -magnitude(rng)));
    v
}

/// Basis of a subspace of `C^n` with the requested relation to the Hermitian
/// form `M = U diag(values) U*` (values ordered positive, zero, negative).
///
/// Also returns `M`.
fn engineered_subspace<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: CaseKind) -> (CMat, CMat) {
    match kind {
        CaseKind::Feasible => {
            let pos = rng.random_range(1..=n);
            let neg = rng.random_range(0..=n - pos);
            let values = spectrum(rng, pos, n - pos - neg, neg);
            let (m, u) = hermitian_with_spectrum(rng, &values);
            let k = rng.random_range(1..=pos);
            let core = u.columns(0, pos) * random_cmatrix(rng, pos, k);
            let tilt = u.columns(pos, n - pos) * random_cmatrix(rng, n - pos, k);
            let tilted = &core + scaled(tilt, 0.1);
            let b = if positive_margin(&m, &tilted) > 1e-3 { tilted } else { core };
            (b, m)
        }
        CaseKind::FeasibleDegenerate => {
            let pos = rng.random_range(1..n);
            let zero = rng.random_range(1..=n - pos);
            let values = spectrum(rng, pos, zero, n - pos - zero);
            let (m, u) = hermitian_with_spectrum(rng, &values);
            let kp = rng.random_range(0..=pos);
            let kz = rng.random_range(1..=zero);
            let b = crate::space::hcat(
                &(u.columns(0, pos) * random_cmatrix(rng, pos, kp)),
                &(u.columns(pos, zero) * random_cmatrix(rng, zero, kz)),
            );
            (b, m)
        }
        CaseKind::InfeasibleNegative => {
            let neg = rng.random_range(1..=n);
            let pos = rng.random_range(0..=n - neg);
            let values = spectrum(rng, pos, n - pos - neg, neg);
            let (m, u) = hermitian_with_spectrum(rng, &values);
            let kp = rng.random_range(0..=pos);
            let b = crate::space::hcat(
                &(u.columns(0, pos) * random_cmatrix(rng, pos, kp)),
                &u.columns(n - neg, 1).into_owned(),
            );
            (b, m)
        }
        CaseKind::InfeasibleNeutral | CaseKind::Random => {
            let pos = rng.random_range(1..n);
            let neg = rng.random_range(1..=n - pos);
            let values = spectrum(rng, pos, n - pos - neg, neg);
            let (m, u) = hermitian_with_spectrum(rng, &values);
            // s = v+/sqrt(l+) + v-/sqrt(|l-|) is neutral while M s != 0.
            let lp = values[0];
            let ln = values[n - neg];
            let s = scaled(u.columns(0, 1).into_owned(), 1.0 / libm::sqrt(lp))
                + scaled(u.columns(n - neg, 1).into_owned(), 1.0 / libm::sqrt(-ln));
            let kp = rng.random_range(0..pos);
            let extra = u.columns(1, pos - 1) * random_cmatrix(rng, pos - 1, kp);
            (crate::space::hcat(&s, &extra), m)
        }
    }
}

/// Smallest eigenvalue of `B* M B`, relative to `||B||^2`.
fn positive_margin(m: &CMat, b: &CMat) -> f64 {
    let nb = linalg::spectral_norm(b);
    linalg::min_eigenvalue(&(b.adjoint() * m * b)) / (nb * nb)
}

/// Seeded ILSQ instance of the given family. `H` has dimension 2 to 6 and a
/// random signature; `A = B R` for an engineered basis `B` of `ran A`.
pub fn ilsq_case(seed: u64, kind: CaseKind) -> crate::ilsq::IlsqInstance {
    let mut r = rng(seed ^ 0x1157_0000);
    let n = r.random_range(2..=6usize);
    let h = random_signature(&mut r, n);
    let (b, m) = match kind {
        CaseKind::Random => {
            let m = random_hermitian(&mut r, n);
            let k = r.random_range(0..=n);
            (random_cmatrix(&mut r, n, k), m)
        }
        _ => engineered_subspace(&mut r, n, kind),
    };
    let k = b.ncols();
    let cols = r.random_range(k.max(1)..=k + 2);
    let a = b * random_cmatrix(&mut r, k, cols);
    let w = h.j() * m;
    let domain = random_signature(&mut r, cols);
    crate::ilsq::IlsqInstance::new(
        crate::space::KreinMap::new(a, domain, h.clone()).expect("shapes agree"),
        crate::space::KreinMap::on(&h, w).expect("square weight"),
        Tolerance::default(),
    )
    .expect("J W is Hermitian")
}

/// Image of `ker V` under `T`, as columns in a codomain of signature
/// `(p, q)` given by its `J`-eigenbasis `(plus, minus)`; the columns relate
/// to the form of the codomain as prescribed by `kind`.
fn engineered_image<R: Rng + ?Sized>(rng: &mut R, plus: &CMat, minus: &CMat, d: usize, kind: CaseKind) -> CMat {
    let (k, p) = (plus.nrows(), plus.ncols());
    match kind {
        CaseKind::Feasible => plus * random_cmatrix(rng, p, d),
        CaseKind::FeasibleDegenerate => {
            let r = rng.random_range(0..d);
            plus * random_cmatrix(rng, p, r) * random_cmatrix(rng, r, d)
        }
        CaseKind::InfeasibleNegative => {
            let negative = minus.columns(0, 1).into_owned();
            let rest = plus * random_cmatrix(rng, p, d - 1);
            crate::space::hcat(&negative, &rest) * random_unitary(rng, d)
        }
        CaseKind::InfeasibleNeutral => {
            let neutral = plus.columns(0, 1) + minus.columns(0, 1);
            let rest = plus.columns(1, p - 1) * random_cmatrix(rng, p - 1, d - 1);
            crate::space::hcat(&neutral, &rest)
        }
        CaseKind::Random => random_cmatrix(rng, k, d),
    }
}

/// Codomain inertia that leaves room for the image prescribed by `kind`.
fn codomain_inertia<R: Rng + ?Sized>(rng: &mut R, d: usize, kind: CaseKind) -> (usize, usize) {
    match kind {
        CaseKind::Feasible | CaseKind::FeasibleDegenerate => (rng.random_range(1..=3), rng.random_range(0..=2)),
        CaseKind::InfeasibleNegative => (rng.random_range(1..=3), rng.random_range(1..=2)),
        CaseKind::InfeasibleNeutral => (rng.random_range(1.max(d)..=d + 1), rng.random_range(1..=2)),
        CaseKind::Random => {
            let p = rng.random_range(0..=3);
            (p, rng.random_range(if p == 0 { 1 } else { 0 }..=3))
        }
    }
}

/// Seeded spline instance. `ker V` has dimension at least one for the
/// engineered kinds, and `T` maps it onto a subspace of the prescribed sign
/// while acting randomly on `(ker V)^⊥`.
pub fn spline_case(seed: u64, kind: CaseKind) -> crate::spline::SplineInstance {
    let mut r = rng(seed ^ 0x5b11_0000);
    let n = r.random_range(2..=6usize);
    let h = random_signature(&mut r, n);
    let d = match kind {
        CaseKind::Random => r.random_range(0..n),
        _ => r.random_range(1..n),
    };
    let frame = random_unitary(&mut r, n);
    let kernel = frame.columns(0, d).into_owned();
    let complement = frame.columns(d, n - d).into_owned();
    let rows = r.random_range(n - d..=n - d + 1);
    let v_codomain = random_signature(&mut r, rows);
    let v = random_cmatrix(&mut r, rows, n - d) * complement.adjoint();
    let (p, q) = codomain_inertia(&mut r, d, kind);
    let k = rotated_signature(&mut r, p, q);
    let (plus, minus) = signature_eigenspaces(&k);
    let image = engineered_image(&mut r, &plus, &minus, d, kind);
    let t = image * kernel.adjoint() + random_cmatrix(&mut r, p + q, n - d) * complement.adjoint();
    crate::spline::SplineInstance::new(
        crate::space::KreinMap::new(t, h.clone(), k).expect("shapes agree"),
        crate::space::KreinMap::new(v, h, v_codomain).expect("shapes agree"),
        Tolerance::default(),
    )
    .expect("T and V share their domain")
}

/// Seeded smoothing instance. For the feasible kinds `T` maps into the
/// positive part of `K1` and `V` into the part of `K2` where `rho [., .]`
/// is positive, so `T#T + rho V#V` is Krein-positive with kernel
/// `ker T ∩ ker V`. The infeasible kinds plant a direction on which the
/// form is negative, or one where it vanishes to first order while `V` does not.
pub fn smoothing_case(seed: u64, kind: CaseKind) -> crate::smoothing::SmoothingInstance {
    let mut r = rng(seed ^ 0x5307_0000);
    let n = r.random_range(2..=5usize);
    let h = random_signature(&mut r, n);
    let rho = match r.random_range(0..4u8) {
        0 => 1.0,
        1 => -1.0,
        _ => {
            let m: f64 = r.random_range(0.3..3.0);
            if r.random_bool(0.5) {
                m
            } else {
                -m
            }
        }
    };
    let p1 = r.random_range(1..=3usize);
    let q1 = r.random_range(usize::from(kind == CaseKind::InfeasibleNegative)..=2);
    let same = r.random_range(usize::from(kind != CaseKind::InfeasibleNeutral)..=3);
    let opposite = r.random_range(usize::from(kind == CaseKind::InfeasibleNeutral)..=2).max(usize::from(same == 0));
    let (p2, q2) = if rho > 0.0 { (same, opposite) } else { (opposite, same) };
    let k1 = rotated_signature(&mut r, p1, q1);
    let k2 = rotated_signature(&mut r, p2, q2);
    let (plus1, minus1) = signature_eigenspaces(&k1);
    let (plus2, minus2) = signature_eigenspaces(&k2);
    let (same_part, opposite_part) = if rho > 0.0 { (plus2, minus2) } else { (minus2, plus2) };

    let frame = random_unitary(&mut r, n);
    let first = frame.columns(0, 1).into_owned();
    let rest = frame.columns(1, n - 1).into_owned();
    let (t, v) = match kind {
        CaseKind::Feasible => {
            (&plus1 * random_cmatrix(&mut r, p1, n), &same_part * random_cmatrix(&mut r, same, n))
        }
        CaseKind::FeasibleDegenerate => (
            &plus1 * random_cmatrix(&mut r, p1, n - 1) * rest.adjoint(),
            &same_part * random_cmatrix(&mut r, same, n - 1) * rest.adjoint(),
        ),
        CaseKind::InfeasibleNegative => (
            scaled(minus1.columns(0, 1) * first.adjoint(), magnitude(&mut r))
                + &plus1 * random_cmatrix(&mut r, p1, n - 1) * rest.adjoint(),
            &same_part * random_cmatrix(&mut r, same, n - 1) * rest.adjoint(),
        ),
        CaseKind::InfeasibleNeutral => {
            // First direction: [T f, T f] = 1 = -rho [V f, V f], with the
            // images orthogonal to everything else.
            let t_first = plus1.columns(0, 1) * first.adjoint();
            let v_first = scaled(opposite_part.columns(0, 1) * first.adjoint(), 1.0 / libm::sqrt(rho.abs()));
            let t_rest = plus1.columns(1, p1 - 1) * random_cmatrix(&mut r, p1 - 1, n - 1) * rest.adjoint();
            let v_rest = &same_part * random_cmatrix(&mut r, same, n - 1) * rest.adjoint();
            (t_first + t_rest, v_first + v_rest)
        }
        CaseKind::Random => (random_cmatrix(&mut r, p1 + q1, n), random_cmatrix(&mut r, p2 + q2, n)),
    };
    crate::smoothing::SmoothingInstance::new(
        crate::space::KreinMap::new(t, h.clone(), k1).expect("shapes agree"),
        crate::space::KreinMap::new(v, h, k2).expect("shapes agree"),
        rho,
        Tolerance::default(),
    )
    .expect("valid smoothing instance")
}
