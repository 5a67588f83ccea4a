//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Criteria run concurrently; every instance is seeded.

mod common;

use std::time::Instant;

use krein_core::ilsq::{analyze_w_inverse, check_regularity_consequence, operator_ilsq_min, solve_ilss_point, IlsqInstance};
use krein_core::instances::{
    ilsq_case, random_cmatrix, random_cvector, random_hermitian, random_signature, rng, signature_eigenspaces,
    smoothing_case, spline_case, CASE_KINDS,
};
use krein_core::linalg::{fro, hermitian_eigen, pinv, rank_with, spectral_norm, trace};
use krein_core::oracle::{default_radius, fd_gradient, quadratic_min, sample_minimality, QuadraticForm};
use krein_core::schur::{is_complementable, is_weakly_complementable, krein_schur_complement};
use krein_core::smoothing::{
    frechet_derivative, operator_smoothing_min, optimal_inverse, smoothing_feasible, smoothing_global_solution,
    solve_smoothing_point, BlockWeight, SmoothingInstance,
};
use krein_core::spline::{operator_spline_min, solve_spline_point, spline_solvability, SplineInstance};
use krein_core::{
    random_fundamental_symmetry, CMat, CVec, KreinMap, SignatureSpace, SubspaceBasis,
    Tolerance, C64,
};
use rand::Rng;

/// Seeds per case kind; five kinds give 600 instances per suite.
const SEEDS: u64 = 120;
const SAMPLES: usize = 1000;
const REJECTION_SEEDS: u64 = 10;
const NON_MINIMIZERS: usize = 60;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn cases() -> impl Iterator<Item = (u64, krein_core::instances::CaseKind)> {
    CASE_KINDS.into_iter().flat_map(|kind| (0..SEEDS).map(move |seed| (seed, kind)))
}

/// Largest entry modulus.
fn max_entry<'a>(entries: impl Iterator<Item = &'a C64>) -> f64 {
    entries.map(|z| z.norm()).fold(0.0, f64::max)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest eigenpair of a Hermitian matrix.
fn top_eigenpair(m: &CMat) -> (f64, CVec) {
    let (values, vectors) = hermitian_eigen(m);
    let last = values.len() - 1;
    (values[last], vectors.column(last).into_owned())
}

fn criterion_1() -> Outcome {
    let mut agree = 0;
    let mut solvable = 0;
    for (seed, kind) in cases() {
        let report = analyze_w_inverse(&ilsq_case(seed, kind));
        ensure(report.conditions_agree(), || {
            format!("seed {seed} {kind:?}: conditions {:?} disagree", report.conditions())
        })?;
        if let Some(expected) = kind.expected_feasible() {
            ensure(report.solvable() == expected, || format!("seed {seed} {kind:?}: solvable {}", report.solvable()))?;
        }
        agree += 1;
        solvable += usize::from(report.solvable());
    }
    Ok(format!("{agree} instances, {solvable} with a W-inverse, all four conditions agree"))
}

fn criterion_2() -> Outcome {
    let tol = Tolerance::default();
    let (mut instances, mut worst) = (0, 0.0_f64);
    let mut seed = 0;
    while instances < 500 {
        let kind = CASE_KINDS[(seed % 5) as usize];
        let inst = ilsq_case(seed / 5, kind);
        seed += 1;
        if !analyze_w_inverse(&inst).solvable() {
            continue;
        }
        instances += 1;
        let h = inst.a().codomain().clone();
        for k in 0..5 {
            let jfs = random_fundamental_symmetry(&h, 1000 * seed + k);
            let sol = operator_ilsq_min(&inst, &jfs).map_err(|e| format!("instance {seed}: {e}"))?;
            let r = KreinMap::on(&h, inst.a().matrix() * sol.x0.matrix() - CMat::identity(h.dim(), h.dim())).unwrap();
            let direct = trace(&(&jfs * r.adjoint().matrix() * inst.w().matrix() * r.matrix()));
            let schur = krein_schur_complement(inst.w(), &inst.range_a(), &jfs, &tol).map_err(|e| e.to_string())?;
            let by_schur = trace(&(&jfs * schur.matrix()));
            let gap = (direct - by_schur).norm() / (1.0 + direct.norm());
            worst = worst.max(gap);
            ensure(gap <= 1e-8, || format!("instance {seed}, symmetry {k}: {direct} vs {by_schur}"))?;
        }
    }
    Ok(format!("{instances} solvable instances x 5 symmetries, worst relative gap {worst:.1e}"))
}

/// Orthonormal basis of the column span, dropping columns whose residual
/// after two Gram-Schmidt passes is below `cutoff`.
fn gram_schmidt(m: &CMat, cutoff: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let n = v.norm();
        if n > cutoff {
            basis.push(v.unscale(n));
        }
    }
    basis
}

fn criterion_3() -> Outcome {
    let mut r = rng(0xc1a5);
    let mut worst = 0.0_f64;
    for trial in 0..200 {
        let n = r.random_range(1..=8usize);
        let k = r.random_range(1..=8usize);
        let rank = r.random_range(1..=n);
        let g = random_cmatrix(&mut r, n, rank);
        let a = random_cmatrix(&mut r, n, k);
        let x = random_cvector(&mut r, n);
        let h = SignatureSpace::hilbert(n);
        let inst = IlsqInstance::new(
            KreinMap::new(a.clone(), SignatureSpace::hilbert(k), h.clone()).unwrap(),
            KreinMap::on(&h, &g * g.adjoint()).unwrap(),
            Tolerance::default(),
        )
        .unwrap();
        let sol = solve_ilss_point(&inst, &x).map_err(|e| format!("trial {trial}: {e}"))?;
        // min ||G*(Az - x)||^2 = ||y||^2 - ||Q* y||^2 with y = G* x and Q
        // an orthonormal basis of ran G*A.
        let b = g.adjoint() * &a;
        let y = g.adjoint() * &x;
        let q = gram_schmidt(&b, 1e-10 * (1.0 + spectral_norm(&b)));
        let textbook = y.norm_squared() - q.iter().map(|q| q.dotc(&y).norm_sqr()).sum::<f64>();
        let gap = (sol.value - textbook).abs();
        worst = worst.max(gap / (1.0 + textbook.abs()));
        ensure(gap <= 1e-8 * (1.0 + textbook.abs()), || format!("trial {trial}: {} vs {textbook}", sol.value))?;
    }
    Ok(format!("200 instances with J = I, W >= 0, worst relative gap {worst:.1e}"))
}

struct Minimality {
    solved: usize,
    worst: f64,
    rejected: usize,
    rejections: usize,
}

impl Minimality {
    fn new() -> Self {
        Minimality { solved: 0, worst: f64::INFINITY, rejected: 0, rejections: 0 }
    }

    /// Checks the solution, and plants a non-minimizer `c + e / sqrt(lambda)`
    /// one unit above the minimum along the top eigenvector `e` of `M`.
    fn check(
        &mut self,
        label: &str,
        f: &dyn Fn(&CVec) -> f64,
        c0: &CVec,
        m: &CMat,
        scale: f64,
    ) -> Result<(), String> {
        let margin = sample_minimality(f, c0, SAMPLES, default_radius(c0), self.solved as u64);
        self.worst = self.worst.min(margin / scale);
        ensure(margin >= -1e-8 * scale, || format!("{label}: margin {margin:.3e} at scale {scale:.3e}"))?;
        self.solved += 1;
        if self.rejections >= NON_MINIMIZERS || m.nrows() == 0 {
            return Ok(());
        }
        let (lambda, e) = top_eigenpair(m);
        if lambda <= 1e-6 * scale {
            return Ok(());
        }
        let bad = c0 + e * c(1.0 / lambda.sqrt());
        let rejected = (0..REJECTION_SEEDS)
            .filter(|&s| sample_minimality(f, &bad, SAMPLES, default_radius(&bad), s) < -1e-3)
            .count();
        self.rejections += 1;
        ensure(rejected >= 9, || format!("{label}: non-minimizer rejected in {rejected} of 10 seeds"))?;
        self.rejected += 1;
        Ok(())
    }
}

fn criterion_4() -> Outcome {
    let mut ilsq = Minimality::new();
    for (seed, kind) in cases() {
        let inst = ilsq_case(seed, kind);
        let x = random_cvector(&mut rng(seed), inst.a().codomain().dim());
        let Ok(sol) = solve_ilss_point(&inst, &x) else { continue };
        let f = |z: &CVec| inst.objective(&x, z);
        let q = QuadraticForm::from_residual(inst.a().matrix(), &inst.w().gram(), &x).unwrap();
        let scale = 1.0 + sol.value.abs() + inst.scale() * (1.0 + sol.u.norm_squared() + x.norm_squared());
        ilsq.check(&format!("ilsq {seed} {kind:?}"), &f, &sol.u, &q.m, scale)?;
    }
    let mut spline = Minimality::new();
    for (seed, kind) in cases() {
        let inst = spline_case(seed, kind);
        let h0 = random_cvector(&mut rng(seed), inst.space().dim());
        let Ok(sol) = solve_spline_point(&inst, &h0) else { continue };
        let n = inst.kernel_v().basis().clone();
        let f = |y: &CVec| inst.objective(&(&sol.x0 + &n * y));
        let tn = inst.t().matrix() * &n;
        let m = tn.adjoint() * inst.t().codomain().j() * &tn;
        let scale = 1.0 + sol.value.abs() + inst.scale() * (1.0 + sol.x0.norm_squared());
        spline.check(&format!("spline {seed} {kind:?}"), &f, &CVec::zeros(n.ncols()), &m, scale)?;
    }
    let mut smoothing = Minimality::new();
    for (seed, kind) in cases() {
        let inst = smoothing_case(seed, kind);
        let h0 = random_cvector(&mut rng(seed), inst.v().codomain().dim());
        let Ok(sol) = solve_smoothing_point(&inst, &h0) else { continue };
        let f = |x: &CVec| inst.objective(&h0, x);
        let m = inst.space().j() * inst.normal_operator().matrix();
        let scale = 1.0
            + sol.value.abs()
            + inst.scale() * (1.0 + sol.u.norm_squared())
            + inst.rho().abs() * h0.norm_squared();
        smoothing.check(&format!("smoothing {seed} {kind:?}"), &f, &sol.u, &m, scale)?;
    }
    let total = 3 * 5 * SEEDS as usize;
    let parts = [("ilsq", &ilsq), ("spline", &spline), ("smoothing", &smoothing)];
    for (name, p) in parts {
        ensure(p.rejections > 0, || format!("{name}: no non-minimizer could be planted"))?;
    }
    let summary: Vec<String> = parts
        .iter()
        .map(|(name, p)| {
            format!("{name} {} solved (worst {:.1e}), {}/{} rejected", p.solved, p.worst, p.rejected, p.rejections)
        })
        .collect();
    Ok(format!("{total} instances: {}", summary.join("; ")))
}

fn criterion_5() -> Outcome {
    let tol = Tolerance::default();
    let mut r = rng(0x5c4);
    let (mut kept, mut attempts, mut singular) = (0, 0, 0);
    let (mut worst_entry, mut worst_range) = (0.0_f64, 0.0_f64);
    while kept < 200 {
        attempts += 1;
        ensure(attempts < 10_000, || format!("only {kept} weakly complementable instances found"))?;
        let n = r.random_range(1..=7usize);
        let h = random_signature(&mut r, n);
        let m = if r.random_bool(0.5) {
            random_hermitian(&mut r, n)
        } else {
            let rank = r.random_range(1..=n);
            let g = random_cmatrix(&mut r, n, rank);
            let signs = CMat::from_diagonal(&CVec::from_fn(g.ncols(), |i, _| c(if i % 3 == 2 { -1.0 } else { 1.0 })));
            &g * signs * g.adjoint()
        };
        let w = KreinMap::on(&h, h.j() * m).unwrap();
        let k = r.random_range(0..=n);
        let s = SubspaceBasis::new(random_cmatrix(&mut r, n, k), &h, &tol).unwrap();
        if !is_weakly_complementable(&w, &s, &tol).unwrap() {
            continue;
        }
        kept += 1;
        let compression = s.basis().adjoint() * w.gram() * s.basis();
        singular += usize::from(rank_with(&compression, 1e-10 * (1.0 + fro(&compression))) < k);
        let reference = krein_schur_complement(&w, &s, h.j(), &tol).map_err(|e| e.to_string())?;
        let basis = gram_schmidt(s.basis(), 0.0);
        for q in &basis {
            let containment = max_entry((q.adjoint() * h.j() * reference.matrix()).iter());
            worst_range = worst_range.max(containment);
            ensure(containment <= 1e-10, || format!("instance {kept}: [W_S x, s] = {containment:.2e}"))?;
        }
        for seed in 0..5 {
            let jfs = random_fundamental_symmetry(&h, 97 * attempts + seed);
            let other = krein_schur_complement(&w, &s, &jfs, &tol).map_err(|e| e.to_string())?;
            let entry = max_entry((other.matrix() - reference.matrix()).iter());
            worst_entry = worst_entry.max(entry);
            ensure(entry <= 1e-8, || format!("instance {kept}, symmetry {seed}: entrywise gap {entry:.2e}"))?;
        }
    }
    Ok(format!(
        "200 weakly complementable instances ({singular} with a singular compression to S) x 5 symmetries, worst entry gap {worst_entry:.1e}, worst range residual {worst_range:.1e}"
    ))
}

/// `(E, jfs, B0)` with `E` of dimension 1 to 3.
fn operator_data(inst: &SmoothingInstance, seed: u64) -> (SignatureSpace, CMat, CMat) {
    let mut r = rng(seed ^ 0xe);
    let dim = r.random_range(1..=3usize);
    let e = random_signature(&mut r, dim);
    let jfs = random_fundamental_symmetry(&e, seed);
    let b0 = random_cmatrix(&mut r, inst.v().codomain().dim(), e.dim());
    (e, jfs, b0)
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..100u64 {
        let inst = smoothing_case(seed, CASE_KINDS[(seed % 5) as usize]);
        let (e, jfs, b0) = operator_data(&inst, seed);
        let mut r = rng(seed ^ 0xf);
        let n = inst.space().dim();
        let x = random_cmatrix(&mut r, n, e.dim());
        let y = random_cmatrix(&mut r, n, e.dim());
        let f = |x: &CMat| inst.operator_objective(&b0, x, &e, &jfs);
        let exact = frechet_derivative(&inst, &b0, &x, &y, &e, &jfs);
        let fd = fd_gradient(&f, &x, &y, 1e-5);
        let rel = (exact - fd).abs() / exact.abs();
        worst = worst.max(rel);
        ensure(rel < 1e-6, || format!("tuple {seed}: DF = {exact}, central difference {fd}"))?;
    }
    let (mut solutions, mut worst_zero) = (0, 0.0_f64);
    let mut seed = 0;
    while solutions < 100 {
        let inst = smoothing_case(seed / 2, CASE_KINDS[(seed % 2) as usize]);
        let (e, jfs, b0) = operator_data(&inst, seed + 10_000);
        seed += 1;
        let b0_map = KreinMap::new(b0.clone(), e.clone(), inst.v().codomain().clone()).unwrap();
        let sol = operator_smoothing_min(&inst, &b0_map, &jfs).map_err(|e| format!("instance {seed}: {e}"))?;
        solutions += 1;
        let x0 = sol.x0.matrix();
        let mut r = rng(seed ^ 0x10);
        for _ in 0..50 {
            let y = random_cmatrix(&mut r, inst.space().dim(), e.dim());
            let d = frechet_derivative(&inst, &b0, x0, &y, &e, &jfs);
            let scale = (inst.scale() * fro(x0) + inst.rho().abs() * spectral_norm(inst.v().matrix()) * fro(&b0))
                * fro(&y)
                * fro(&jfs);
            worst_zero = worst_zero.max(d.abs() / scale);
            ensure(d.abs() <= 1e-8 * scale, || format!("instance {seed}: DF(X0)(Y) = {d:.3e}, scale {scale:.3e}"))?;
        }
    }
    Ok(format!(
        "100 tuples (worst relative error {worst:.1e}); 100 minimizers x 50 directions (worst {worst_zero:.1e})"
    ))
}

fn criterion_7() -> Outcome {
    let (mut feasible, mut worst_g, mut worst_value) = (0, 0.0_f64, 0.0_f64);
    for (seed, kind) in cases() {
        let inst = smoothing_case(seed, kind);
        if !smoothing_feasible(&inst) {
            continue;
        }
        feasible += 1;
        let g = smoothing_global_solution(&inst).map_err(|e| format!("seed {seed} {kind:?}: {e}"))?;
        let g = g.g.matrix();
        let tt = inst.t().adjoint().compose(inst.t()).unwrap();
        let weight = BlockWeight::diagonal(tt, KreinMap::identity(inst.v().codomain()), inst.rho(), inst.tol()).unwrap();
        let oi = optimal_inverse(inst.v(), &weight, inst.rho(), inst.tol()).map_err(|e| e.to_string())?;
        // Independent route: the minimum-norm minimizer of the Hermitian
        // reduction of x -> [Tx, Tx] + rho [Vx - e_j, Vx - e_j], column by column.
        let k = inst.v().codomain().dim();
        let m = inst.space().j() * inst.normal_operator().matrix();
        let vjk = inst.v().matrix().adjoint() * inst.v().codomain().j();
        let mut by_oracle = CMat::zeros(inst.space().dim(), k);
        for j in 0..k {
            let ej = CVec::from_fn(k, |i, _| c(if i == j { 1.0 } else { 0.0 }));
            let v = -(&vjk * &ej) * c(inst.rho());
            let cst = inst.rho() * inst.v().codomain().j()[(j, j)].re;
            let q = QuadraticForm::with_scale(
                krein_core::linalg::hermitian_part(&m),
                v,
                cst,
                inst.scale(),
            )
            .unwrap();
            let min = quadratic_min(&q, inst.tol()).map_err(|e| format!("seed {seed}: oracle {e}"))?;
            by_oracle.set_column(j, &min.argmin);
        }
        let gap = max_entry((g - oi.g.matrix()).iter()).max(max_entry((g - &by_oracle).iter()));
        worst_g = worst_g.max(gap);
        ensure(gap <= 1e-9, || format!("seed {seed} {kind:?}: entrywise gap {gap:.2e}"))?;
        let mut r = rng(seed ^ 0x77);
        for _ in 0..3 {
            let h0 = random_cvector(&mut r, k);
            let point = solve_smoothing_point(&inst, &h0).map_err(|e| e.to_string())?;
            let via_g = inst.objective(&h0, &(g * &h0));
            let gap = (via_g - point.value).abs() / (1.0 + point.value.abs());
            worst_value = worst_value.max(gap);
            ensure(gap <= 1e-8, || format!("seed {seed} {kind:?}: value {via_g} vs {}", point.value))?;
        }
    }
    ensure(feasible >= 200, || format!("only {feasible} feasible instances"))?;
    Ok(format!("{feasible} feasible instances, worst entry gap {worst_g:.1e}, worst value gap {worst_value:.1e}"))
}

fn spline_value_by_schur(inst: &SplineInstance, b0: &KreinMap, jfs: &CMat) -> Result<f64, String> {
    let h = inst.space();
    let tt = inst.t_sharp_t();
    let schur = krein_schur_complement(&tt, &inst.kernel_v(), h.j(), inst.tol()).map_err(|e| e.to_string())?;
    let y = KreinMap::new(pinv(inst.v().matrix(), inst.tol()) * b0.matrix(), b0.domain().clone(), h.clone()).unwrap();
    Ok(trace(&(jfs * y.adjoint().matrix() * schur.matrix() * y.matrix())).re)
}

fn criterion_8() -> Outcome {
    let (mut count, mut global, mut worst) = (0, 0, 0.0_f64);
    for (seed, kind) in cases() {
        let inst = spline_case(seed, kind);
        let h = inst.space().clone();
        let exists = spline_solvability(&inst).global_exists;
        let operator = operator_spline_min(&inst, inst.v(), h.j());
        let pointwise = (0..h.dim()).all(|j| {
            let ej = CVec::from_fn(h.dim(), |i, _| c(if i == j { 1.0 } else { 0.0 }));
            solve_spline_point(&inst, &ej).is_ok()
        });
        ensure(exists == operator.is_ok() && exists == pointwise, || {
            format!("seed {seed} {kind:?}: global {exists}, operator {}, pointwise {pointwise}", operator.is_ok())
        })?;
        if let Some(expected) = kind.expected_feasible() {
            ensure(exists == expected, || format!("seed {seed} {kind:?}: global {exists}"))?;
        }
        count += 1;
        if !exists {
            continue;
        }
        global += 1;
        let mut r = rng(seed ^ 0x88);
        let dim = r.random_range(1..=3usize);
    let e = random_signature(&mut r, dim);
        let b0 = KreinMap::new(
            inst.v().matrix() * random_cmatrix(&mut r, h.dim(), e.dim()),
            e.clone(),
            inst.v().codomain().clone(),
        )
        .unwrap();
        let jfs_h = random_fundamental_symmetry(&h, seed);
        let jfs_e = random_fundamental_symmetry(&e, seed);
        for (b0, jfs) in [(inst.v().clone(), jfs_h), (b0, jfs_e)] {
            let sol = operator_spline_min(&inst, &b0, &jfs).map_err(|e| format!("seed {seed}: {e}"))?;
            let expected = spline_value_by_schur(&inst, &b0, &jfs)?;
            let gap = (sol.value - expected).abs() / (1.0 + expected.abs());
            worst = worst.max(gap);
            ensure(gap <= 1e-8, || format!("seed {seed} {kind:?}: value {} vs {expected}", sol.value))?;
        }
    }
    Ok(format!("{count} instances ({global} solvable) agree; worst value gap {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let tol = Tolerance::default();
    let mut with_inverse = 0;
    for (seed, kind) in cases() {
        let inst = ilsq_case(seed, kind);
        if !analyze_w_inverse(&inst).solvable() {
            continue;
        }
        with_inverse += 1;
        let ok = is_complementable(inst.w(), &inst.range_a(), &tol).map_err(|e| e.to_string())?;
        ensure(ok, || format!("seed {seed} {kind:?}: W-inverse exists but W is not complementable"))?;
    }
    let mut r = rng(0x9e9);
    let (mut identity_cases, mut regular) = (0, 0);
    for trial in 0..600 {
        let n = r.random_range(1..=6usize);
        let h = random_signature(&mut r, n);
        let (plus, minus) = signature_eigenspaces(&h);
        let k = r.random_range(1..=n);
        let a = match trial % 3 {
            0 if plus.ncols() > 0 => {
                let tilt = if minus.ncols() > 0 { &minus * random_cmatrix(&mut r, minus.ncols(), k) * c(0.3) } else { CMat::zeros(n, k) };
                &plus * random_cmatrix(&mut r, plus.ncols(), k) + tilt
            }
            1 => random_cmatrix(&mut r, n, k),
            _ => random_cmatrix(&mut r, n, 1) * random_cmatrix(&mut r, 1, k),
        };
        let inst = IlsqInstance::new(
            KreinMap::new(a, random_signature(&mut r, k), h.clone()).unwrap(),
            KreinMap::identity(&h),
            tol,
        )
        .unwrap();
        identity_cases += 1;
        regular += usize::from(analyze_w_inverse(&inst).solvable());
        let ok = check_regularity_consequence(&inst).map_err(|e| e.to_string())?;
        ensure(ok, || format!("W = I trial {trial}: indefinite inverse exists but ran A is not regular"))?;
    }
    ensure(regular >= 100, || format!("only {regular} W = I instances have an indefinite inverse"))?;
    Ok(format!(
        "{with_inverse} instances with a W-inverse are complementable; {regular} of {identity_cases} W = I instances invertible, all with regular ran A"
    ))
}

fn criterion_10() -> Outcome {
    for entry in &common::CORPUS {
        common::check_corpus_entry(entry)?;
    }
    for (name, _, _, _) in common::CORPUS {
        let path = common::corpus(name);
        let path = path.to_str().unwrap();
        let first = common::krein(&["run", path, "--seed", "5"]);
        let result = first.result();
        let text = serde_json::to_string(&result).map_err(|e| e.to_string())?;
        let again: krein_cli::ResultFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure(again == result, || format!("{name}: result file does not round-trip"))?;
        let second = common::krein(&["run", path, "--seed", "5"]).result();
        ensure(second.certificate == result.certificate, || format!("{name}: certificate depends on more than the seed"))?;
        if name != "invalid_malformed.json" {
            let text = std::fs::read_to_string(common::corpus(name)).unwrap();
            let file: krein_cli::ProblemFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let back: krein_cli::ProblemFile =
                serde_json::from_str(&serde_json::to_string(&file).unwrap()).map_err(|e| e.to_string())?;
            ensure(back == file, || format!("{name}: problem file does not round-trip"))?;
        }
    }
    Ok("12 corpus files: statuses, reasons and exit codes as expected; round-trip and seed determinism hold".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("W-inverse conditions agree", criterion_1),
        ("operator ILSQ two-path value", criterion_2),
        ("classical weighted least squares", criterion_3),
        ("sampling minimality", criterion_4),
        ("Schur complement independent of the symmetry", criterion_5),
        ("Frechet derivative", criterion_6),
        ("global smoothing operator coincidence", criterion_7),
        ("spline solvability equivalence", criterion_8),
        ("complementability and regularity", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let start = Instant::now();
    let outcomes: Vec<(Outcome, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, run)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
                        let message = p
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_default();
                        Err(format!("panicked: {message}"))
                    });
                    (outcome, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failures = 0;
    for (i, ((name, _), (outcome, secs))) in criteria.iter().zip(&outcomes).enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass in {:.1}s", 10 - failures, start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
