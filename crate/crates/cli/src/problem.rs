//! Parsing and validation of problem files into solver-ready instances.

use std::collections::BTreeMap;
use std::fmt;

use krein_core::ilsq::IlsqInstance;
use krein_core::smoothing::{BlockWeight, SmoothingInstance};
use krein_core::spline::SplineInstance;
use krein_core::{
    is_fundamental_symmetry, validate_signature, CMat, CVec, KreinError, KreinMap, SignatureSpace, SubspaceBasis,
    Tolerance, C64,
};

use crate::format::{Matrix, OptionsSpec, ProblemFile, ProblemSpec, SignatureSpec, Vector};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = krein_core::oracle::DEFAULT_SAMPLES;

/// Malformed input (`Parse`) or well-formed input breaking an invariant
/// (`Validation`), located by a dotted field path such as `spaces.H.J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputError {
    Parse { path: String, message: String },
    Validation { path: String, message: String },
}

impl InputError {
    fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        InputError::Validation { path: path.into(), message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InputError::Parse { .. } => "ParseError",
            InputError::Validation { .. } => "ValidationError",
        }
    }

    pub fn path(&self) -> &str {
        match self {
            InputError::Parse { path, .. } | InputError::Validation { path, .. } => path,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            InputError::Parse { message, .. } | InputError::Validation { message, .. } => message,
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at `{}`: {}", self.kind(), self.path(), self.message())
    }
}

impl std::error::Error for InputError {}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem_type: Option<String>,
    pub rank_tol: Option<f64>,
    pub psd_tol: Option<f64>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
}

/// A validated problem, ready to run.
#[derive(Debug, Clone)]
pub struct Problem {
    /// The source file after any type override.
    pub file: ProblemFile,
    pub kind: ProblemKind,
    pub tol: Tolerance,
    pub seed: u64,
    pub n_samples: usize,
}

#[derive(Debug, Clone)]
pub enum ProblemKind {
    Ilsq { inst: IlsqInstance, x: Option<CVec>, jfs: CMat },
    Spline { inst: SplineInstance, h0: Option<CVec>, b0: Option<KreinMap>, jfs: CMat },
    Smoothing { inst: SmoothingInstance, h0: Option<CVec>, b0: Option<KreinMap>, jfs: CMat },
    Schur { w: KreinMap, subspace: SubspaceBasis, jfs: CMat },
    OptimalInverse { a: KreinMap, weight: BlockWeight, rho: f64 },
    Adjoint { t: KreinMap },
    Jtrace { t: KreinMap, jfs: CMat },
}

impl Problem {
    pub fn type_tag(&self) -> &'static str {
        self.file.problem.type_tag()
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, InputError> {
    parse_problem_with(text, &Overrides::default())
}

pub fn parse_problem_with(text: &str, overrides: &Overrides) -> Result<Problem, InputError> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| InputError::Parse { path: String::new(), message: e.to_string() })?;
    if let Some(tag) = &overrides.problem_type {
        match value.get_mut("problem").and_then(|p| p.as_object_mut()) {
            Some(problem) => {
                problem.insert("type".into(), serde_json::Value::String(tag.clone()));
            }
            None => return Err(InputError::Parse { path: "problem".into(), message: "missing problem object".into() }),
        }
    }
    let file: ProblemFile = serde_path_to_error::deserialize(value)
        .map_err(|e| InputError::Parse { path: e.path().to_string(), message: e.inner().to_string() })?;
    validate(file, overrides)
}

pub fn read_problem(path: &std::path::Path, overrides: &Overrides) -> Result<Problem, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::Parse { path: String::new(), message: format!("{}: {e}", path.display()) })?;
    parse_problem_with(&text, overrides)
}

struct Context {
    operators: BTreeMap<String, KreinMap>,
    tol: Tolerance,
}

impl Context {
    fn operator(&self, name: &str, path: &str) -> Result<KreinMap, InputError> {
        self.operators
            .get(name)
            .cloned()
            .ok_or_else(|| InputError::validation(path, format!("unknown operator `{name}`")))
    }

    /// `name` must act on `space`, i.e. be square on it.
    fn operator_on(&self, name: &str, space: &SignatureSpace, path: &str) -> Result<KreinMap, InputError> {
        let op = self.operator(name, path)?;
        if op.domain() != space || op.codomain() != space {
            return Err(InputError::validation(path, format!("`{name}` must map the space to itself")));
        }
        Ok(op)
    }

    fn jfs(&self, name: Option<&str>, space: &SignatureSpace, path: &str) -> Result<CMat, InputError> {
        let Some(name) = name else {
            return Ok(space.j().clone());
        };
        let op = self.operator_on(name, space, path)?;
        if !is_fundamental_symmetry(op.matrix(), space, &self.tol) {
            return Err(InputError::validation(path, format!("`{name}` is not a fundamental symmetry")));
        }
        Ok(op.into_matrix())
    }
}

fn complex(z: &[f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

fn finite(z: &[f64; 2]) -> bool {
    z[0].is_finite() && z[1].is_finite()
}

pub(crate) fn decode_matrix(m: &Matrix, rows: usize, cols: usize, path: &str) -> Result<CMat, InputError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(InputError::validation(path, format!("expected a {rows}x{cols} matrix")));
    }
    if m.iter().flatten().any(|z| !finite(z)) {
        return Err(InputError::validation(path, "entries must be finite"));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| complex(&m[i][j])))
}

/// A matrix whose shape is read from the data (at least one row).
pub(crate) fn decode_any_matrix(m: &Matrix, path: &str) -> Result<CMat, InputError> {
    let cols = m.first().map_or(0, Vec::len);
    decode_matrix(m, m.len(), cols, path)
}

pub(crate) fn decode_vector(v: &Vector, len: usize, path: &str) -> Result<CVec, InputError> {
    if v.len() != len {
        return Err(InputError::validation(path, format!("expected {len} entries, found {}", v.len())));
    }
    if v.iter().any(|z| !finite(z)) {
        return Err(InputError::validation(path, "entries must be finite"));
    }
    Ok(CVec::from_fn(len, |i, _| complex(&v[i])))
}

pub(crate) fn encode_matrix(m: &CMat) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub(crate) fn encode_vector(v: &CVec) -> Vector {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn signature(name: &str, spec: &crate::format::SpaceSpec, tol: &Tolerance) -> Result<SignatureSpace, InputError> {
    let path = format!("spaces.{name}.J");
    if spec.dim == 0 {
        return Err(InputError::validation(format!("spaces.{name}.dim"), "dimension must be positive"));
    }
    let j = match &spec.j {
        SignatureSpec::Diag(d) => {
            if d.len() != spec.dim {
                return Err(InputError::validation(path, format!("expected {} diagonal entries", spec.dim)));
            }
            CMat::from_fn(spec.dim, spec.dim, |i, k| C64::new(if i == k { d[i] } else { 0.0 }, 0.0))
        }
        SignatureSpec::Dense(m) => decode_matrix(m, spec.dim, spec.dim, &path)?,
    };
    validate_signature(j, tol).map_err(|e| InputError::validation(path, e.to_string()))
}

fn tolerance(options: &OptionsSpec, overrides: &Overrides) -> Result<Tolerance, InputError> {
    let d = Tolerance::default();
    let fields = [
        ("options.rank_tol", overrides.rank_tol.or(options.rank_tol).unwrap_or(d.rank_tol)),
        ("options.psd_tol", overrides.psd_tol.or(options.psd_tol).unwrap_or(d.psd_tol)),
        ("options.residual_tol", options.residual_tol.unwrap_or(d.residual_tol)),
    ];
    for (path, v) in fields {
        if !(v.is_finite() && v >= 0.0) {
            return Err(InputError::validation(path, "tolerances must be finite and nonnegative"));
        }
    }
    Tolerance::new(fields[0].1, fields[1].1, fields[2].1)
        .map_err(|e| InputError::validation("options", e.to_string()))
}

fn core_error(path: &str, e: KreinError) -> InputError {
    InputError::validation(path, e.to_string())
}

fn nonzero_rho(rho: f64) -> Result<f64, InputError> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(InputError::validation("problem.rho", "rho must be a nonzero finite number"));
    }
    Ok(rho)
}

/// Validates a deserialized file. All signature matrices pass
/// `validate_signature`; operators match their declared spaces.
pub fn validate(file: ProblemFile, overrides: &Overrides) -> Result<Problem, InputError> {
    if file.field != "complex" {
        return Err(InputError::validation("field", "only the \"complex\" field is supported"));
    }
    let tol = tolerance(&file.options, overrides)?;
    let mut spaces = BTreeMap::new();
    for (name, spec) in &file.spaces {
        spaces.insert(name.clone(), signature(name, spec, &tol)?);
    }
    let mut operators = BTreeMap::new();
    for (name, spec) in &file.operators {
        let space = |which: &str, key: &str| {
            spaces.get(key).cloned().ok_or_else(|| {
                InputError::validation(format!("operators.{name}.{which}"), format!("unknown space `{key}`"))
            })
        };
        let domain = space("domain", &spec.domain)?;
        let codomain = space("codomain", &spec.codomain)?;
        let m = decode_matrix(&spec.matrix, codomain.dim(), domain.dim(), &format!("operators.{name}.matrix"))?;
        operators.insert(name.clone(), KreinMap::new(m, domain, codomain).expect("shape checked"));
    }
    let ctx = Context { operators, tol };
    let kind = build_kind(&file.problem, &ctx)?;
    if let Some(0) = overrides.n_samples.or(file.options.n_samples) {
        return Err(InputError::validation("options.n_samples", "at least one sample is required"));
    }
    Ok(Problem {
        seed: overrides.seed.or(file.options.seed).unwrap_or(DEFAULT_SEED),
        n_samples: overrides.n_samples.or(file.options.n_samples).unwrap_or(DEFAULT_SAMPLES),
        tol: ctx.tol,
        kind,
        file,
    })
}

fn build_kind(spec: &ProblemSpec, ctx: &Context) -> Result<ProblemKind, InputError> {
    let tol = ctx.tol;
    Ok(match spec {
        ProblemSpec::Ilsq { a, w, x, jfs } => {
            let a = ctx.operator(a, "problem.A")?;
            let h = a.codomain().clone();
            let w = ctx.operator_on(w, &h, "problem.W")?;
            let inst = IlsqInstance::new(a, w, tol).map_err(|e| core_error("problem.W", e))?;
            let x = x.as_ref().map(|x| decode_vector(x, h.dim(), "problem.x")).transpose()?;
            let jfs = ctx.jfs(jfs.as_deref(), &h, "problem.jfs")?;
            ProblemKind::Ilsq { inst, x, jfs }
        }
        ProblemSpec::Spline { t, v, h0, b0, jfs } => {
            let t = ctx.operator(t, "problem.T")?;
            let v = ctx.operator(v, "problem.V")?;
            if t.domain() != v.domain() {
                return Err(InputError::validation("problem.V", "T and V must share their domain"));
            }
            let h = t.domain().clone();
            let b0 = b0.as_deref().map(|n| ctx.operator(n, "problem.B0")).transpose()?;
            if let Some(b) = &b0 {
                if b.codomain() != v.codomain() {
                    return Err(InputError::validation("problem.B0", "B0 must map into the codomain of V"));
                }
            }
            let h0 = h0.as_ref().map(|x| decode_vector(x, h.dim(), "problem.h0")).transpose()?;
            let e = b0.as_ref().map_or(&h, |b| b.domain()).clone();
            let jfs = ctx.jfs(jfs.as_deref(), &e, "problem.jfs")?;
            let inst = SplineInstance::new(t, v, tol).map_err(|e| core_error("problem.V", e))?;
            ProblemKind::Spline { inst, h0, b0, jfs }
        }
        ProblemSpec::Smoothing { t, v, rho, h0, b0, jfs } => {
            let rho = nonzero_rho(*rho)?;
            let t = ctx.operator(t, "problem.T")?;
            let v = ctx.operator(v, "problem.V")?;
            if t.domain() != v.domain() {
                return Err(InputError::validation("problem.V", "T and V must share their domain"));
            }
            let k = v.codomain().clone();
            let b0 = b0.as_deref().map(|n| ctx.operator(n, "problem.B0")).transpose()?;
            if let Some(b) = &b0 {
                if b.codomain() != &k {
                    return Err(InputError::validation("problem.B0", "B0 must map into the codomain of V"));
                }
            }
            let h0 = h0.as_ref().map(|x| decode_vector(x, k.dim(), "problem.h0")).transpose()?;
            let e = b0.as_ref().map_or(&k, |b| b.domain()).clone();
            let jfs = ctx.jfs(jfs.as_deref(), &e, "problem.jfs")?;
            let inst = SmoothingInstance::new(t, v, rho, tol).map_err(|e| core_error("problem.V", e))?;
            ProblemKind::Smoothing { inst, h0, b0, jfs }
        }
        ProblemSpec::Schur { w, subspace, jfs } => {
            let w = ctx.operator(w, "problem.W")?;
            if w.domain() != w.codomain() {
                return Err(InputError::validation("problem.W", "W must map a space to itself"));
            }
            let h = w.domain().clone();
            if !krein_core::is_krein_selfadjoint(&w, &tol) {
                return Err(InputError::validation("problem.W", "W must be Krein-selfadjoint"));
            }
            let cols = subspace.first().map_or(0, Vec::len);
            let basis = decode_matrix(subspace, h.dim(), cols, "problem.subspace")?;
            let subspace = SubspaceBasis::new(basis, &h, &tol).map_err(|e| core_error("problem.subspace", e))?;
            let jfs = ctx.jfs(jfs.as_deref(), &h, "problem.jfs")?;
            ProblemKind::Schur { w, subspace, jfs }
        }
        ProblemSpec::OptimalInverse { a, rho, blocks } => {
            let rho = nonzero_rho(*rho)?;
            let a = ctx.operator(a, "problem.A")?;
            let w11 = ctx.operator_on(&blocks.w11, a.domain(), "problem.blocks.W11")?;
            let w22 = ctx.operator_on(&blocks.w22, a.codomain(), "problem.blocks.W22")?;
            let w12 = match &blocks.w12 {
                Some(name) => {
                    let op = ctx.operator(name, "problem.blocks.W12")?;
                    if op.domain() != a.codomain() || op.codomain() != a.domain() {
                        return Err(InputError::validation(
                            "problem.blocks.W12",
                            "W12 must map the codomain of A into its domain",
                        ));
                    }
                    op
                }
                None => KreinMap::zero(a.codomain(), a.domain()),
            };
            let weight = BlockWeight::new(w11, w12, w22, rho, &tol).map_err(|e| core_error("problem.blocks", e))?;
            ProblemKind::OptimalInverse { a, weight, rho }
        }
        ProblemSpec::Adjoint { t } => ProblemKind::Adjoint { t: ctx.operator(t, "problem.T")? },
        ProblemSpec::Jtrace { t, jfs } => {
            let t = ctx.operator(t, "problem.T")?;
            if t.domain() != t.codomain() {
                return Err(InputError::validation("problem.T", "the trace needs an operator on one space"));
            }
            let jfs = ctx.jfs(jfs.as_deref(), t.domain(), "problem.jfs")?;
            ProblemKind::Jtrace { t, jfs }
        }
    })
}
