//! Dispatch of validated problems to the solvers, and certification of
//! results by the independent oracles.

use std::fmt;

use krein_core::certificate::Verdict;
use krein_core::ilsq::{analyze_w_inverse, operator_ilsq_min, solve_ilss_point};
use krein_core::linalg::{fro, spectral_norm};
use krein_core::oracle::{basis_sum_trace, default_radius, fd_gradient, sample_minimality, sample_minimality_matrix};
use krein_core::schur::krein_schur_complement;
use krein_core::smoothing::{
    frechet_derivative, operator_smoothing_min, optimal_inverse, smoothing_global_solution, solve_smoothing_point,
};
use krein_core::spline::{operator_spline_min, solve_spline_point};
use krein_core::{
    instances, linalg, random_fundamental_symmetry, CMat, CVec, KreinError, KreinMap, SolutionCertificate, C64,
};

use crate::format::{CertificateBlock, ErrorBlock, OracleBlock, ResultFile, SolutionPayload, Status, ToleranceBlock};
use crate::problem::{decode_any_matrix, decode_vector, encode_matrix, encode_vector, InputError, Problem, ProblemKind};

/// Margins below `-MARGIN_TOL * scale` refute a claimed minimum.
pub const MARGIN_TOL: f64 = 1e-8;
/// Relative disagreement allowed between two routes to the same value.
pub const PATH_TOL: f64 = 1e-8;
/// Relative error allowed between the analytic and finite-difference derivative.
pub const GRADIENT_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    /// Only solved results can be certified.
    InvalidState(Status),
    /// The result does not carry the solution payload the problem needs.
    MissingSolution(String),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::InvalidState(s) => write!(f, "InvalidState: cannot certify a result with status {s:?}"),
            CertifyError::MissingSolution(what) => write!(f, "result is missing its {what}"),
        }
    }
}

impl std::error::Error for CertifyError {}

fn tolerance_block(problem: Option<&Problem>) -> ToleranceBlock {
    let t = problem.map_or_else(krein_core::Tolerance::default, |p| p.tol);
    ToleranceBlock { rank_tol: t.rank_tol, psd_tol: t.psd_tol, residual_tol: t.residual_tol }
}

fn base_result(status: Status, problem: Option<&Problem>) -> ResultFile {
    ResultFile {
        status,
        reason: None,
        problem_type: problem.map(|p| p.type_tag().to_string()),
        solution: None,
        certificate: None,
        error: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: tolerance_block(problem),
        seed: problem.map_or(crate::problem::DEFAULT_SEED, |p| p.seed),
        n_samples: problem.map_or(crate::problem::DEFAULT_SAMPLES, |p| p.n_samples),
    }
}

/// Result file for input that failed to parse or validate.
pub fn invalid_input(error: &InputError) -> ResultFile {
    let mut r = base_result(Status::InvalidInput, None);
    r.reason = Some(error.kind().to_string());
    r.error = Some(ErrorBlock {
        kind: error.kind().to_string(),
        path: error.path().to_string(),
        message: error.message().to_string(),
    });
    r
}

fn certificate_block(c: &SolutionCertificate) -> CertificateBlock {
    CertificateBlock {
        normal_residual: c.normal_residual,
        min_eigenvalue: c.min_eigenvalue,
        two_path_values: c.two_path_values.map(|(a, b)| [a, b]),
        worst_margin: c.worst_margin,
        constraint_residual: c.constraint_residual,
        companion_residual: c.companion_residual,
        gradient_error: c.gradient_error,
        scale: None,
        oracle: None,
    }
}

fn vector_solution(u: &CVec, value: f64) -> SolutionPayload {
    SolutionPayload { vector: Some(encode_vector(u)), value: Some(value), ..SolutionPayload::default() }
}

fn matrix_solution(m: &CMat, value: Option<f64>) -> SolutionPayload {
    SolutionPayload { matrix: Some(encode_matrix(m)), value, ..SolutionPayload::default() }
}

type Solved = (SolutionPayload, SolutionCertificate);

fn solve(problem: &Problem) -> Result<Solved, KreinError> {
    let tol = &problem.tol;
    match &problem.kind {
        ProblemKind::Ilsq { inst, x: Some(x), .. } => {
            let s = solve_ilss_point(inst, x)?;
            Ok((vector_solution(&s.u, s.value), s.certificate))
        }
        ProblemKind::Ilsq { inst, x: None, jfs } => {
            let report = analyze_w_inverse(inst);
            if let Verdict::NoSolution(reason) = report.certificate.verdict {
                return Err(KreinError::NoSolution(reason));
            }
            let s = operator_ilsq_min(inst, jfs)?;
            let mut payload = matrix_solution(s.x0.matrix(), Some(s.value));
            payload.conditions = Some(report.conditions().to_vec());
            Ok((payload, s.certificate))
        }
        ProblemKind::Spline { inst, h0: Some(h0), .. } => {
            let s = solve_spline_point(inst, h0)?;
            Ok((vector_solution(&s.x0, s.value), s.certificate))
        }
        ProblemKind::Spline { inst, h0: None, b0, jfs } => {
            let s = operator_spline_min(inst, b0.as_ref().unwrap_or(inst.v()), jfs)?;
            Ok((matrix_solution(s.x0.matrix(), Some(s.value)), s.certificate))
        }
        ProblemKind::Smoothing { inst, h0: Some(h0), .. } => {
            let s = solve_smoothing_point(inst, h0)?;
            Ok((vector_solution(&s.u, s.value), s.certificate))
        }
        ProblemKind::Smoothing { inst, h0: None, b0: Some(b0), jfs } => {
            let s = operator_smoothing_min(inst, b0, jfs)?;
            Ok((matrix_solution(s.x0.matrix(), Some(s.value)), s.certificate))
        }
        ProblemKind::Smoothing { inst, h0: None, b0: None, .. } => {
            let g = smoothing_global_solution(inst)?;
            Ok((matrix_solution(g.g.matrix(), None), g.certificate))
        }
        ProblemKind::Schur { w, subspace, jfs } => {
            let s = krein_schur_complement(w, subspace, jfs, tol)?;
            // Range of the complement must be orthogonal to S for [., .].
            let containment = fro(&(subspace.basis().adjoint() * w.codomain().j() * s.matrix()));
            let cert = SolutionCertificate { companion_residual: Some(containment), ..SolutionCertificate::solved() };
            Ok((matrix_solution(s.matrix(), None), cert))
        }
        ProblemKind::OptimalInverse { a, weight, rho } => {
            let g = optimal_inverse(a, weight, *rho, tol)?;
            Ok((matrix_solution(g.g.matrix(), None), g.certificate))
        }
        ProblemKind::Adjoint { t } => {
            Ok((matrix_solution(t.adjoint().matrix(), None), SolutionCertificate::solved()))
        }
        ProblemKind::Jtrace { t, jfs } => {
            let v = krein_core::j_trace(t, jfs, tol)?;
            let payload = SolutionPayload {
                value: Some(v.re),
                complex_value: Some([v.re, v.im]),
                ..SolutionPayload::default()
            };
            Ok((payload, SolutionCertificate::solved()))
        }
    }
}

/// Solves the problem and, when solved, certifies the answer with the
/// problem's seed and sample count.
pub fn run(problem: &Problem) -> ResultFile {
    let mut result = base_result(Status::Solved, Some(problem));
    match solve(problem) {
        Ok((payload, cert)) => {
            result.solution = Some(payload);
            result.certificate = Some(certificate_block(&cert));
            certify(problem, &result, problem.n_samples, problem.seed).expect("fresh solved result")
        }
        Err(KreinError::NoSolution(reason)) => {
            result.status = Status::NoSolution;
            result.reason = Some(reason.code().to_string());
            result.certificate = Some(CertificateBlock::default());
            result
        }
        Err(KreinError::PathMismatch { primary, secondary }) => {
            result.status = Status::InternalError;
            result.reason = Some("PathMismatch".into());
            result.certificate =
                Some(CertificateBlock { two_path_values: Some([primary, secondary]), ..CertificateBlock::default() });
            result
        }
        Err(other) => {
            result.status = Status::InvalidInput;
            result.reason = Some("ValidationError".into());
            result.error = Some(ErrorBlock {
                kind: "ValidationError".into(),
                path: "problem".into(),
                message: other.to_string(),
            });
            result
        }
    }
}

fn candidate_vector(result: &ResultFile, len: usize) -> Result<CVec, CertifyError> {
    let v = result.solution.as_ref().and_then(|s| s.vector.as_ref());
    let v = v.ok_or_else(|| CertifyError::MissingSolution("solution vector".into()))?;
    decode_vector(v, len, "solution.vector").map_err(|e| CertifyError::MissingSolution(e.to_string()))
}

fn candidate_matrix(result: &ResultFile, rows: usize, cols: usize) -> Result<CMat, CertifyError> {
    let m = result.solution.as_ref().and_then(|s| s.matrix.as_ref());
    let m = m.ok_or_else(|| CertifyError::MissingSolution("solution matrix".into()))?;
    let decoded = decode_any_matrix(m, "solution.matrix").map_err(|e| CertifyError::MissingSolution(e.to_string()))?;
    if decoded.shape() != (rows, cols) {
        return Err(CertifyError::MissingSolution(format!("{rows}x{cols} solution matrix")));
    }
    Ok(decoded)
}

/// `1 + |f(c)| + problem_scale (1 + ||c||^2)`: the magnitude that objective
/// differences near the candidate `c` are judged against.
fn margin_scale(value: f64, problem_scale: f64, candidate_norm: f64) -> f64 {
    1.0 + value.abs() + problem_scale * (1.0 + candidate_norm * candidate_norm)
}

fn relative_gap(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + a.norm())
}

/// `tr(jfs (X# M X))` for `X: E -> H`, `M` on `H`.
fn trace_form(x: &KreinMap, m: &CMat, jfs: &CMat) -> C64 {
    linalg::trace(&(jfs * (x.adjoint().matrix() * m * x.matrix())))
}

struct Oracle {
    worst_margin: Option<f64>,
    two_path_gap: Option<f64>,
    gradient_error: Option<f64>,
    scale: f64,
}

impl Oracle {
    fn margin(worst: f64, scale: f64) -> Self {
        Oracle { worst_margin: Some(worst), two_path_gap: None, gradient_error: None, scale }
    }

    fn gap(gap: f64) -> Self {
        Oracle { worst_margin: None, two_path_gap: Some(gap), gradient_error: None, scale: 1.0 }
    }
}

/// Re-checks a solved result against the oracles: seeded sampling
/// minimality, a second route to the minimum value, and finite-difference
/// derivatives where they apply. Appends the margins to the certificate.
pub fn certify(problem: &Problem, result: &ResultFile, n_samples: usize, seed: u64) -> Result<ResultFile, CertifyError> {
    if result.status != Status::Solved {
        return Err(CertifyError::InvalidState(result.status));
    }
    let n_samples = n_samples.max(1);
    let oracle = oracle_checks(problem, result, n_samples, seed)?;
    let passed = oracle.worst_margin.is_none_or(|m| m >= -MARGIN_TOL * oracle.scale)
        && oracle.two_path_gap.is_none_or(|g| g <= PATH_TOL)
        && oracle.gradient_error.is_none_or(|g| g <= GRADIENT_TOL);
    let mut out = result.clone();
    let cert = out.certificate.get_or_insert_with(CertificateBlock::default);
    cert.scale = Some(oracle.scale);
    cert.oracle = Some(OracleBlock {
        seed,
        n_samples,
        worst_margin: oracle.worst_margin,
        two_path_gap: oracle.two_path_gap,
        gradient_error: oracle.gradient_error,
        scale: oracle.scale,
        passed,
    });
    Ok(out)
}

fn oracle_checks(problem: &Problem, result: &ResultFile, n: usize, seed: u64) -> Result<Oracle, CertifyError> {
    let tol = &problem.tol;
    Ok(match &problem.kind {
        ProblemKind::Ilsq { inst, x: Some(x), .. } => {
            let u = candidate_vector(result, inst.a().domain().dim())?;
            let f = |z: &CVec| inst.objective(x, z);
            let worst = sample_minimality(&f, &u, n, default_radius(&u), seed);
            let scale = margin_scale(f(&u), inst.scale(), u.norm()) + inst.scale() * x.norm_squared();
            Oracle::margin(worst, scale)
        }
        ProblemKind::Ilsq { inst, x: None, jfs } => {
            let h = inst.a().codomain();
            let x0 = candidate_matrix(result, inst.a().domain().dim(), h.dim())?;
            let objective = |x: &CMat| {
                let r = KreinMap::on(h, inst.a().matrix() * x - linalg::identity(h.dim())).expect("square");
                trace_form(&r, inst.w().matrix(), jfs).re
            };
            let worst = sample_minimality_matrix(&objective, &x0, n, 1.0 + fro(&x0), seed);
            let primary = C64::new(objective(&x0), 0.0);
            let gap = match krein_schur_complement(inst.w(), &inst.range_a(), jfs, tol) {
                Ok(s) => relative_gap(primary, linalg::trace(&(jfs * s.matrix()))),
                Err(_) => f64::INFINITY,
            };
            let scale = margin_scale(primary.re, inst.scale() * fro(jfs), fro(&x0)) + fro(inst.w().matrix()) * fro(jfs);
            Oracle { two_path_gap: Some(gap), ..Oracle::margin(worst, scale) }
        }
        ProblemKind::Spline { inst, h0: Some(_), .. } => {
            let x0 = candidate_vector(result, inst.space().dim())?;
            let basis = inst.kernel_v().basis().clone();
            let f = |y: &CVec| inst.objective(&(&x0 + &basis * y));
            let origin = CVec::zeros(basis.ncols());
            let worst = sample_minimality(&f, &origin, n, default_radius(&x0), seed);
            Oracle::margin(worst, margin_scale(inst.objective(&x0), inst.scale(), x0.norm()))
        }
        ProblemKind::Spline { inst, h0: None, b0, jfs } => {
            let b0 = b0.as_ref().unwrap_or(inst.v());
            let (h, e) = (inst.space(), b0.domain());
            let x0 = candidate_matrix(result, h.dim(), e.dim())?;
            let tt = inst.t_sharp_t();
            let basis = inst.kernel_v().basis().clone();
            let objective = |x: &CMat| trace_form(&KreinMap::new(x.clone(), e.clone(), h.clone()).expect("shape"), tt.matrix(), jfs).re;
            let constrained = |y: &CMat| objective(&(&x0 + &basis * y));
            let origin = CMat::zeros(basis.ncols(), e.dim());
            let worst = sample_minimality_matrix(&constrained, &origin, n, 1.0 + fro(&x0), seed);
            let primary = C64::new(objective(&x0), 0.0);
            let y0 = linalg::pinv(inst.v().matrix(), tol) * b0.matrix();
            let gap = krein_schur_complement(&tt, &inst.kernel_v(), h.j(), tol).ok().map(|s| {
                let y = KreinMap::new(y0.clone(), e.clone(), h.clone()).expect("shape");
                relative_gap(primary, trace_form(&y, s.matrix(), jfs))
            });
            let scale = margin_scale(primary.re, inst.scale() * fro(jfs), fro(&x0));
            Oracle { two_path_gap: gap, ..Oracle::margin(worst, scale) }
        }
        ProblemKind::Smoothing { inst, h0: Some(h0), .. } => {
            let x0 = candidate_vector(result, inst.space().dim())?;
            let f = |x: &CVec| inst.objective(h0, x);
            let worst = sample_minimality(&f, &x0, n, default_radius(&x0), seed);
            let scale = margin_scale(f(&x0), inst.scale(), x0.norm()) + inst.rho().abs() * h0.norm_squared();
            Oracle::margin(worst, scale)
        }
        ProblemKind::Smoothing { inst, h0: None, b0: Some(b0), jfs } => {
            let (h, e) = (inst.space(), b0.domain());
            let x0 = candidate_matrix(result, h.dim(), e.dim())?;
            let f = |x: &CMat| inst.operator_objective(b0.matrix(), x, e, jfs);
            let worst = sample_minimality_matrix(&f, &x0, n, 1.0 + fro(&x0), seed);
            let mut rng = instances::rng(seed);
            let x = &x0 + instances::random_cmatrix(&mut rng, h.dim(), e.dim());
            let y = instances::random_cmatrix(&mut rng, h.dim(), e.dim());
            let exact = frechet_derivative(inst, b0.matrix(), &x, &y, e, jfs);
            let fd = fd_gradient(&f, &x, &y, FD_STEP);
            let b = fro(b0.matrix());
            let scale = margin_scale(f(&x0), inst.scale() * fro(jfs), fro(&x0)) + inst.rho().abs() * b * b * fro(jfs);
            Oracle { gradient_error: Some((exact - fd).abs() / (1.0 + exact.abs())), ..Oracle::margin(worst, scale) }
        }
        ProblemKind::Smoothing { inst, h0: None, b0: None, .. } => {
            let k = inst.v().codomain().dim();
            let g = candidate_matrix(result, inst.space().dim(), k)?;
            let mut rng = instances::rng(seed);
            let (mut worst, mut scale) = (f64::INFINITY, 1.0_f64);
            for i in 0..3u64 {
                let h0 = instances::random_cvector(&mut rng, k);
                let x0 = &g * &h0;
                let f = |x: &CVec| inst.objective(&h0, x);
                worst = worst.min(sample_minimality(&f, &x0, n, default_radius(&x0), seed + i));
                let s = margin_scale(f(&x0), inst.scale(), x0.norm()) + inst.rho().abs() * h0.norm_squared();
                scale = scale.max(s);
            }
            Oracle::margin(worst, scale)
        }
        ProblemKind::OptimalInverse { a, weight, rho } => {
            let (h, k) = (a.domain(), a.codomain());
            let g = candidate_matrix(result, h.dim(), k.dim())?;
            let w = weight.assemble();
            let mut gram = CMat::zeros(h.dim() + k.dim(), h.dim() + k.dim());
            gram.view_mut((0, 0), (h.dim(), h.dim())).copy_from(h.j());
            gram.view_mut((h.dim(), h.dim()), (k.dim(), k.dim())).copy_from(&(k.j() * C64::new(*rho, 0.0)));
            let weighted = gram * &w;
            let a_norm = spectral_norm(a.matrix());
            let problem_scale = spectral_norm(&weighted) * (1.0 + a_norm) * (1.0 + a_norm);
            let mut rng = instances::rng(seed);
            let (mut worst, mut scale) = (f64::INFINITY, 1.0_f64);
            for i in 0..3u64 {
                let h0 = instances::random_cvector(&mut rng, k.dim());
                let f = |x: &CVec| {
                    let mut z = CVec::zeros(h.dim() + k.dim());
                    z.rows_mut(0, h.dim()).copy_from(x);
                    z.rows_mut(h.dim(), k.dim()).copy_from(&(a.matrix() * x - &h0));
                    z.dotc(&(&weighted * &z)).re
                };
                let x0 = &g * &h0;
                worst = worst.min(sample_minimality(&f, &x0, n, default_radius(&x0), seed + i));
                scale = scale.max(margin_scale(f(&x0), problem_scale, x0.norm()) + problem_scale * h0.norm_squared());
            }
            Oracle::margin(worst, scale)
        }
        ProblemKind::Schur { w, subspace, jfs } => {
            let h = w.domain();
            let s = candidate_matrix(result, h.dim(), h.dim())?;
            let other = random_fundamental_symmetry(h, seed);
            let again = krein_schur_complement(w, subspace, &other, tol).map_err(|e| CertifyError::MissingSolution(e.to_string()))?;
            let _ = jfs;
            Oracle::gap(fro(&(again.matrix() - &s)) / (1.0 + fro(&s)))
        }
        ProblemKind::Adjoint { t } => {
            let adj = candidate_matrix(result, t.domain().dim(), t.codomain().dim())?;
            let mut rng = instances::rng(seed);
            let mut gap = 0.0_f64;
            for _ in 0..n.min(100) {
                let x = instances::random_cvector(&mut rng, t.domain().dim());
                let y = instances::random_cvector(&mut rng, t.codomain().dim());
                let lhs = t.codomain().form(&(t.matrix() * &x), &y);
                let rhs = t.domain().form(&x, &(&adj * &y));
                gap = gap.max((lhs - rhs).norm() / (1.0 + fro(t.matrix()) * x.norm() * y.norm()));
            }
            Oracle::gap(gap)
        }
        ProblemKind::Jtrace { t, jfs } => {
            let v = result.solution.as_ref().and_then(|s| s.complex_value);
            let v = v.ok_or_else(|| CertifyError::MissingSolution("complex value".into()))?;
            let by_basis = basis_sum_trace(t.matrix(), t.domain().j(), jfs);
            Oracle::gap(relative_gap(C64::new(v[0], v[1]), by_basis))
        }
    })
}
