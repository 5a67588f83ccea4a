use core::fmt;

/// Why a problem was determined to have no solution.
///
/// These are successful determinations, not input errors: each one names the
/// necessary condition for existence that the data violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoSolutionReason {
    /// A subspace that must be nonnegative for the quadratic form is not.
    NotNonnegative,
    /// A coefficient operator that must be Krein-positive is not.
    NotPositive,
    /// The normal equation (or a range inclusion) is inconsistent.
    Inconsistent,
    /// The weight is not weakly complementable with respect to the subspace.
    NotWeaklyComplementable,
    /// `ran B0` is not contained in `ran V`.
    RangeHypothesisFailed,
}

impl NoSolutionReason {
    pub fn code(self) -> &'static str {
        match self {
            Self::NotNonnegative => "NotNonnegative",
            Self::NotPositive => "NotPositive",
            Self::Inconsistent => "Inconsistent",
            Self::NotWeaklyComplementable => "NotWeaklyComplementable",
            Self::RangeHypothesisFailed => "RangeHypothesisFailed",
        }
    }
}

impl fmt::Display for NoSolutionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Failure modes of the quadratic minimization oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoMinimumReason {
    /// The Hessian has a negative eigenvalue; the form is unbounded below.
    Indefinite,
    /// The linear term has a component in the kernel of the Hessian.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KreinError {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { defect: f64 },
    NotInvolution { defect: f64 },
    NotSelfadjoint { defect: f64 },
    NotFullRank { rank: usize, cols: usize },
    DimensionMismatch { expected: usize, found: usize, what: &'static str },
    InvalidFundamentalSymmetry,
    InvalidTolerance,
    InvalidRho,
    /// The operation requires the identity weight.
    NotIdentityWeight,
    NoSolution(NoSolutionReason),
    NoMinimum(NoMinimumReason),
    /// Two independent evaluations of the same minimum disagree. Never a valid
    /// output; indicates a numerical or logic defect.
    PathMismatch { primary: f64, secondary: f64 },
}

impl KreinError {
    pub fn no_solution(reason: NoSolutionReason) -> Self {
        KreinError::NoSolution(reason)
    }

    /// The reason code when this error is a certified nonexistence.
    pub fn no_solution_reason(&self) -> Option<NoSolutionReason> {
        match self {
            KreinError::NoSolution(r) => Some(*r),
            _ => None,
        }
    }
}

impl fmt::Display for KreinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KreinError::NotSquare { rows, cols } => {
                write!(f, "matrix is not square ({rows}x{cols})")
            }
            KreinError::NotHermitian { defect } => {
                write!(f, "matrix is not Hermitian (defect {defect:e})")
            }
            KreinError::NotInvolution { defect } => {
                write!(f, "matrix is not an involution (defect {defect:e})")
            }
            KreinError::NotSelfadjoint { defect } => {
                write!(f, "operator is not Krein-selfadjoint (defect {defect:e})")
            }
            KreinError::NotFullRank { rank, cols } => {
                write!(f, "basis has rank {rank} but {cols} columns")
            }
            KreinError::DimensionMismatch { expected, found, what } => {
                write!(f, "dimension mismatch for {what}: expected {expected}, found {found}")
            }
            KreinError::InvalidFundamentalSymmetry => f.write_str("not a fundamental symmetry"),
            KreinError::InvalidTolerance => f.write_str("tolerances must be nonnegative"),
            KreinError::InvalidRho => f.write_str("rho must be a nonzero finite real"),
            KreinError::NotIdentityWeight => f.write_str("operation requires W = I"),
            KreinError::NoSolution(r) => write!(f, "no solution: {r}"),
            KreinError::NoMinimum(r) => write!(f, "no minimum: {r:?}"),
            KreinError::PathMismatch { primary, secondary } => {
                write!(f, "two-path values disagree: {primary} vs {secondary}")
            }
        }
    }
}

impl core::error::Error for KreinError {}

pub type Result<T> = core::result::Result<T, KreinError>;
