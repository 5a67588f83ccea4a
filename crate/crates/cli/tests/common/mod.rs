#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use krein_cli::ResultFile;

/// Corpus file, expected status, expected reason (or error path), exit code.
pub const CORPUS: [(&str, &str, &str, i32); 12] = [
    ("solved_ilsq_point.json", "solved", "", 0),
    ("solved_spline_operator.json", "solved", "", 0),
    ("solved_smoothing_point.json", "solved", "", 0),
    ("solved_schur.json", "solved", "", 0),
    ("nosolution_spline_negative_kernel.json", "no_solution", "NotNonnegative", 2),
    ("nosolution_schur_neutral.json", "no_solution", "NotWeaklyComplementable", 2),
    ("nosolution_ilsq_negative_range.json", "no_solution", "NotNonnegative", 2),
    ("nosolution_smoothing_indefinite.json", "no_solution", "NotPositive", 2),
    ("invalid_signature.json", "invalid_input", "spaces.H.J", 3),
    ("invalid_zero_rho.json", "invalid_input", "problem.rho", 3),
    ("invalid_malformed.json", "invalid_input", "", 3),
    ("invalid_shape.json", "invalid_input", "operators.T.matrix", 3),
];

pub fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    pub fn result(&self) -> ResultFile {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not a result file ({e}): {}", self.stdout))
    }
}

pub fn krein(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_krein")).args(args).output().expect("binary runs");
    Output {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf8 stderr"),
    }
}

/// Checks one corpus entry against the binary; `Err` describes the mismatch.
pub fn check_corpus_entry(entry: &(&str, &str, &str, i32)) -> Result<ResultFile, String> {
    let (name, status, detail, code) = *entry;
    let path = corpus(name);
    let out = krein(&["run", path.to_str().expect("utf8 path")]);
    if out.code != code {
        return Err(format!("{name}: exit {} instead of {code}; stderr: {}", out.code, out.stderr));
    }
    let result = out.result();
    let got = serde_json::to_value(result.status).expect("status serializes");
    if got != status {
        return Err(format!("{name}: status {got} instead of {status}"));
    }
    match status {
        "no_solution" if result.reason.as_deref() != Some(detail) => {
            return Err(format!("{name}: reason {:?} instead of {detail}", result.reason));
        }
        "invalid_input" => {
            let error = result.error.as_ref().ok_or_else(|| format!("{name}: no error block"))?;
            if !detail.is_empty() && error.path != detail {
                return Err(format!("{name}: error path {} instead of {detail}", error.path));
            }
        }
        "solved" => {
            let oracle = result.certificate.as_ref().and_then(|c| c.oracle.as_ref());
            if !oracle.is_some_and(|o| o.passed) {
                return Err(format!("{name}: solved without a passing certificate"));
            }
        }
        _ => {}
    }
    Ok(result)
}
