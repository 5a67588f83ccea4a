//! Wire formats: problem files in, result files out.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays of them. Every field name here is part of the file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub type Complex = [f64; 2];
pub type Vector = Vec<Complex>;
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: String,
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    #[serde(rename = "J")]
    pub j: SignatureSpec,
}

/// `{"diag": [1, -1]}` or `{"dense": [[[1, 0], [0, 0]], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureSpec {
    Diag(Vec<f64>),
    Dense(Matrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub domain: String,
    pub codomain: String,
    pub matrix: Matrix,
}

/// The problem, tagged by `type`. Operator fields name entries of
/// `operators`; `jfs` optionally names a fundamental symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Ilsq {
        #[serde(rename = "A")]
        a: String,
        #[serde(rename = "W")]
        w: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vector>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jfs: Option<String>,
    },
    Spline {
        #[serde(rename = "T")]
        t: String,
        #[serde(rename = "V")]
        v: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h0: Option<Vector>,
        #[serde(rename = "B0", default, skip_serializing_if = "Option::is_none")]
        b0: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jfs: Option<String>,
    },
    Smoothing {
        #[serde(rename = "T")]
        t: String,
        #[serde(rename = "V")]
        v: String,
        rho: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h0: Option<Vector>,
        #[serde(rename = "B0", default, skip_serializing_if = "Option::is_none")]
        b0: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jfs: Option<String>,
    },
    Schur {
        #[serde(rename = "W")]
        w: String,
        subspace: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jfs: Option<String>,
    },
    OptimalInverse {
        #[serde(rename = "A")]
        a: String,
        rho: f64,
        blocks: BlockSpec,
    },
    Adjoint {
        #[serde(rename = "T")]
        t: String,
    },
    Jtrace {
        #[serde(rename = "T")]
        t: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jfs: Option<String>,
    },
}

impl ProblemSpec {
    pub fn type_tag(&self) -> &'static str {
        match self {
            ProblemSpec::Ilsq { .. } => "ilsq",
            ProblemSpec::Spline { .. } => "spline",
            ProblemSpec::Smoothing { .. } => "smoothing",
            ProblemSpec::Schur { .. } => "schur",
            ProblemSpec::OptimalInverse { .. } => "optimal_inverse",
            ProblemSpec::Adjoint { .. } => "adjoint",
            ProblemSpec::Jtrace { .. } => "jtrace",
        }
    }
}

/// Blocks of a weight on `H x K`; `W12` defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(rename = "W11")]
    pub w11: String,
    #[serde(rename = "W12", default, skip_serializing_if = "Option::is_none")]
    pub w12: Option<String>,
    #[serde(rename = "W22")]
    pub w22: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    NoSolution,
    InvalidInput,
    /// Two independent evaluations disagreed; never expected.
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Solved => 0,
            Status::InternalError => 1,
            Status::NoSolution => 2,
            Status::InvalidInput => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBlock>,
    pub version: String,
    pub tolerances: ToleranceBlock,
    pub seed: u64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_value: Option<Complex>,
    /// Existence conditions evaluated along independent routes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_path_values: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_error: Option<f64>,
    /// Magnitude that `worst_margin` is judged against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Oracle margins appended by certification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleBlock {
    pub seed: u64,
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_path_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_error: Option<f64>,
    pub scale: f64,
    /// Every margin is within its tolerance.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBlock {
    pub kind: String,
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceBlock {
    pub rank_tol: f64,
    pub psd_tol: f64,
    pub residual_tol: f64,
}
