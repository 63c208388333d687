//! Scalar backends for step-function coefficients.
//!
//! [`ScaledScalar`] is the exact backend (cyclotomic numbers with `sqrt(q)`
//! adjoined); `Complex64` is the float fallback.

mod cyclo;
mod float;
mod scaled;

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::Result;

pub use cyclo::{phi, CycloScalar, MAX_FLOAT_CONDUCTOR};
pub use float::{FLOAT_TOL, FLOAT_ZERO};
pub use scaled::ScaledScalar;

/// Coefficient field operations shared by the exact and float backends.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero(p: u32) -> Self;
    fn from_rational(p: u32, r: &BigRational) -> Self;
    fn root_of_unity(p: u32, phase: &BigRational) -> Result<Self>;
    /// `q^{e/2}`.
    fn sqrt_q_pow(p: u32, e: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn scale_rational(&self, r: &BigRational) -> Self;
    fn to_complex(&self) -> Result<Complex64>;
    /// Exact rational value, if the backend can certify one.
    fn to_rational(&self) -> Option<BigRational>;
    /// `sum_j c_j zeta_{p^n}^{e_j}`.
    fn character_sum(p: u32, n: u32, terms: &[(u64, &Self)]) -> Self;

    fn one(p: u32) -> Self {
        Self::from_rational(p, &BigRational::from_integer(1.into()))
    }

    fn from_int(p: u32, k: i64) -> Self {
        Self::from_rational(p, &BigRational::from_integer(k.into()))
    }

    fn abs_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    /// `|z|^2` as a float.
    fn abs_sq_f64(&self) -> f64 {
        match self.abs_sq().to_rational() {
            Some(r) => num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN),
            None => self.to_complex().map(|z| z.norm_sqr()).unwrap_or(f64::NAN),
        }
    }

    /// Semantic equality (tolerant for the float backend).
    fn same_value(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl Scalar for ScaledScalar {
    fn zero(p: u32) -> Self {
        ScaledScalar::zero(p)
    }

    fn from_rational(p: u32, r: &BigRational) -> Self {
        ScaledScalar::from_rational(p, r)
    }

    fn root_of_unity(p: u32, phase: &BigRational) -> Result<Self> {
        ScaledScalar::root_of_unity(p, phase)
    }

    fn sqrt_q_pow(p: u32, e: i64) -> Self {
        ScaledScalar::sqrt_q_pow(p, e)
    }

    fn is_zero(&self) -> bool {
        ScaledScalar::is_zero(self)
    }

    fn add(&self, o: &Self) -> Self {
        ScaledScalar::add(self, o)
    }

    fn sub(&self, o: &Self) -> Self {
        ScaledScalar::sub(self, o)
    }

    fn mul(&self, o: &Self) -> Self {
        ScaledScalar::mul(self, o)
    }

    fn neg(&self) -> Self {
        ScaledScalar::neg(self)
    }

    fn conj(&self) -> Self {
        ScaledScalar::conj(self)
    }

    fn scale_rational(&self, r: &BigRational) -> Self {
        ScaledScalar::scale(self, r)
    }

    fn to_complex(&self) -> Result<Complex64> {
        ScaledScalar::to_complex(self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        ScaledScalar::to_rational(self)
    }

    fn character_sum(p: u32, n: u32, terms: &[(u64, &Self)]) -> Self {
        ScaledScalar::character_sum(p, n, terms)
    }
}
