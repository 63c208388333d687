use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::Scalar;
use crate::error::{Error, Result};

/// Magnitude below which float values are treated as zero.
pub const FLOAT_ZERO: f64 = 1e-13;

/// Default tolerance for comparing float results.
pub const FLOAT_TOL: f64 = 1e-9;

fn rat(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for Complex64 {
    fn zero(_p: u32) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn from_rational(_p: u32, r: &BigRational) -> Self {
        Complex64::new(rat(r), 0.0)
    }

    fn root_of_unity(p: u32, phase: &BigRational) -> Result<Self> {
        let mut den = phase.denom().clone();
        while (&den % p) == 0u32.into() {
            den /= p;
        }
        if den != 1u32.into() {
            return Err(Error::BadPhase(phase.to_string()));
        }
        let frac = phase - phase.floor();
        Ok(Complex64::from_polar(1.0, std::f64::consts::TAU * rat(&frac)))
    }

    fn sqrt_q_pow(p: u32, e: i64) -> Self {
        Complex64::new((p as f64).powf(e as f64 / 2.0), 0.0)
    }

    fn is_zero(&self) -> bool {
        self.norm() < FLOAT_ZERO
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn sub(&self, o: &Self) -> Self {
        self - o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn scale_rational(&self, r: &BigRational) -> Self {
        self * rat(r)
    }

    fn to_complex(&self) -> Result<Complex64> {
        Ok(*self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn character_sum(p: u32, n: u32, terms: &[(u64, &Self)]) -> Self {
        let len = (p as f64).powi(n as i32);
        terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (e, c)| {
            acc + *c * Complex64::from_polar(1.0, std::f64::consts::TAU * (*e as f64) / len)
        })
    }
}
