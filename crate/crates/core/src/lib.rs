//! Exact wavelet analysis over the p-adic numbers.
//!
//! Test functions on `Q_p` are finite combinations of ball indicators, so
//! Fourier transforms, wavelet coefficients, frame sums and Besov norms all
//! reduce to finite sums. The engine evaluates those sums exactly, with
//! coefficients in cyclotomic fields of p-power conductor extended by
//! `sqrt(p)`.

pub mod affine;
pub mod cwt;
pub mod error;
pub mod fourier;
pub mod frames;
pub mod generators;
pub mod io;
pub mod padic;
pub mod scalars;
pub mod spaces;
pub mod stepfn;

pub use error::{Error, Result};
pub use padic::{Ball, PAdicNumber};
pub use scalars::{CycloScalar, Scalar, ScaledScalar};
pub use stepfn::StepFunction;
