use crate::error::{KreinError, Result};

/// Numerical thresholds shared by every existence test.
///
/// All three are relative: each test multiplies them by a reference magnitude
/// of the operators involved, so verdicts are invariant under rescaling of
/// the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Singular values at or below `rank_tol * reference` are treated as zero.
    pub rank_tol: f64,
    /// Hermitian matrices with smallest eigenvalue `>= -psd_tol * reference`
    /// count as positive semidefinite.
    pub psd_tol: f64,
    /// Residuals at or below `residual_tol * reference` count as zero.
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_tol: 1e-10, psd_tol: 1e-10, residual_tol: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(rank_tol: f64, psd_tol: f64, residual_tol: f64) -> Result<Self> {
        let tol = Tolerance { rank_tol, psd_tol, residual_tol };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(self.rank_tol) && ok(self.psd_tol) && ok(self.residual_tol) {
            Ok(())
        } else {
            Err(KreinError::InvalidTolerance)
        }
    }

    pub fn rank_cutoff(&self, reference: f64) -> f64 {
        self.rank_tol * reference
    }

    pub fn psd_floor(&self, reference: f64) -> f64 {
        -self.psd_tol * reference
    }

    pub fn residual_bound(&self, reference: f64) -> f64 {
        self.residual_tol * reference
    }
}
