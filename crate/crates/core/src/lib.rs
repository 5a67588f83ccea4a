//! Indefinite weighted least squares, abstract splines and smoothing in
//! finite-dimensional Krein spaces.
//!
//! The crate decides existence of pointwise and global (operator) solutions,
//! computes canonical minimum-norm solutions, Krein Schur complements and
//! J-trace minimum values, and attaches numerical certificates to every
//! answer. It is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certificate;
pub mod error;
pub mod fundamental;
pub mod ilsq;
pub mod instances;
pub mod linalg;
pub mod oracle;
pub mod schur;
pub mod smoothing;
pub mod space;
pub mod spline;
pub mod tolerance;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub use certificate::SolutionCertificate;
pub use error::{KreinError, NoMinimumReason, NoSolutionReason, Result};
pub use fundamental::{is_fundamental_symmetry, random_fundamental_symmetry};
pub use space::{
    indefinite_adjoint, is_krein_positive, is_krein_selfadjoint, is_regular_subspace,
    is_w_nonnegative_subspace, j_trace, orthogonal_companion, validate_signature, KreinMap,
    SignatureSpace, SubspaceBasis,
};
pub use tolerance::Tolerance;
