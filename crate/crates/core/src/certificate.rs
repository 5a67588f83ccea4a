use crate::error::NoSolutionReason;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Verdict {
    #[default]
    Solved,
    NoSolution(NoSolutionReason),
}

/// Numerical evidence attached to a solver answer. Fields that do not apply
/// to a given problem stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionCertificate {
    pub verdict: Verdict,
    /// Norm of the residual of the normal equation at the returned solution.
    pub normal_residual: Option<f64>,
    /// Smallest eigenvalue of the Hermitian matrix behind the positivity or
    /// nonnegativity test (relative to its scale).
    pub min_eigenvalue: Option<f64>,
    /// Minimum value computed along two independent routes.
    pub two_path_values: Option<(f64, f64)>,
    /// Smallest `objective(sample) - objective(solution)` over seeded samples.
    pub worst_margin: Option<f64>,
    /// Residual of an equality constraint (`V x0 - V h0`, `V X0 - B0`, ...).
    pub constraint_residual: Option<f64>,
    /// Residual of an orthogonality condition attached to the minimizer.
    pub companion_residual: Option<f64>,
    /// Relative error between an analytic derivative and finite differences.
    pub gradient_error: Option<f64>,
}

impl SolutionCertificate {
    pub fn solved() -> Self {
        SolutionCertificate::default()
    }

    pub fn no_solution(reason: NoSolutionReason) -> Self {
        SolutionCertificate { verdict: Verdict::NoSolution(reason), ..Default::default() }
    }

    pub fn is_solved(&self) -> bool {
        self.verdict == Verdict::Solved
    }
}
