//! File formats, validation and the command-line surface for `krein-core`.
//!
//! A problem file is JSON: named spaces (with their signature `J`), named
//! operators between them, one problem, and options. Running it yields a
//! result file with a status, the solution, and a certificate block.

pub mod batch;
pub mod format;
pub mod problem;
pub mod runner;

pub use format::{ProblemFile, ResultFile, Status};
pub use problem::{parse_problem, parse_problem_with, read_problem, InputError, Overrides, Problem, ProblemKind};
pub use runner::{certify, invalid_input, run, CertifyError};

/// Runs the problem in `text`; input errors become `invalid_input` results.
pub fn run_text(text: &str, overrides: &Overrides) -> ResultFile {
    match parse_problem_with(text, overrides) {
        Ok(p) => run(&p),
        Err(e) => invalid_input(&e),
    }
}
