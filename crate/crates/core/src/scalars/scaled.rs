use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::cyclo::{CycloScalar, GroupRing};
use crate::error::{Error, Result};
use crate::padic::q_pow;

/// Exact scalar `a + b * sqrt(p)` with `a`, `b` cyclotomic of p-power conductor.
///
/// The pair is not a unique representation: for `p = 2` and `p = 1 mod 4` the
/// square root already lives in a cyclotomic field. Equality and zero tests are
/// therefore semantic.
#[derive(Clone)]
pub struct ScaledScalar {
    a: CycloScalar,
    b: CycloScalar,
}

/// `sqrt(p)` inside `Q(zeta_{p^n})`, when it lies there.
fn sqrt_p_cyclo(p: u32) -> Option<CycloScalar> {
    if p == 2 {
        return Some(CycloScalar::root(2, 3, 1).add(&CycloScalar::root(2, 3, 7)));
    }
    if p % 4 != 1 {
        return None;
    }
    // quadratic Gauss sum
    let mut acc = GroupRing::new(p, 1);
    let one = CycloScalar::from_int(p, 1);
    let minus = CycloScalar::from_int(p, -1);
    for a in 1..p as u64 {
        let residue = BigInt::from(a).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
        acc.add_shifted(if residue.is_one() { &one } else { &minus }, a as usize);
    }
    Some(acc.finish())
}

impl ScaledScalar {
    pub fn new(a: CycloScalar, b: CycloScalar) -> Self {
        assert_eq!(a.p(), b.p());
        ScaledScalar { a, b }
    }

    pub fn zero(p: u32) -> Self {
        Self::new(CycloScalar::zero(p), CycloScalar::zero(p))
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    pub fn from_int(p: u32, k: i64) -> Self {
        Self::new(CycloScalar::from_int(p, k), CycloScalar::zero(p))
    }

    pub fn from_rational(p: u32, r: &BigRational) -> Self {
        Self::new(CycloScalar::from_rational(p, r), CycloScalar::zero(p))
    }

    pub fn from_cyclo(a: CycloScalar) -> Self {
        let p = a.p();
        Self::new(a, CycloScalar::zero(p))
    }

    /// `exp(2 pi i phase)` for a phase with a p-power denominator.
    pub fn root_of_unity(p: u32, phase: &BigRational) -> Result<Self> {
        let mut den = phase.denom().clone();
        let pb = BigInt::from(p);
        let mut n = 0u32;
        while (&den % &pb).is_zero() {
            den /= &pb;
            n += 1;
        }
        if !den.is_one() {
            return Err(Error::BadPhase(phase.to_string()));
        }
        let modulus = phase.denom();
        let e = phase.numer().mod_floor(modulus);
        let e: u64 = e
            .try_into()
            .map_err(|_| Error::TooLarge(format!("conductor {modulus}")))?;
        Ok(Self::from_cyclo(CycloScalar::root(p, n, e)))
    }

    /// `q^{e/2}`.
    pub fn sqrt_q_pow(p: u32, e: i64) -> Self {
        let half = q_pow(p, e.div_euclid(2));
        if e.rem_euclid(2) == 0 {
            Self::from_rational(p, &half)
        } else {
            Self::new(CycloScalar::zero(p), CycloScalar::from_rational(p, &half))
        }
    }

    pub fn p(&self) -> u32 {
        self.a.p()
    }

    pub fn a(&self) -> &CycloScalar {
        &self.a
    }

    pub fn b(&self) -> &CycloScalar {
        &self.b
    }

    /// True when the `sqrt(q)` component is structurally absent.
    pub fn is_pure_cyclotomic(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conductor_exp(&self) -> u32 {
        self.a.conductor_exp().max(self.b.conductor_exp())
    }

    /// The value as a single cyclotomic number, when `sqrt(p)` is cyclotomic.
    fn folded(&self) -> Option<CycloScalar> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        sqrt_p_cyclo(self.p()).map(|g| self.a.add(&self.b.mul(&g)))
    }

    pub fn is_zero(&self) -> bool {
        match self.folded() {
            Some(c) => c.is_zero(),
            // sqrt(p) is irrational over Q(zeta_{p^n}) for p = 3 mod 4
            None => false,
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.folded().and_then(|c| c.to_rational())
    }

    /// `r` with `self == r * other`, when such a rational exists.
    pub fn ratio_to(&self, other: &Self) -> Option<BigRational> {
        let coords = |v: &Self, n: u32| -> Vec<BigRational> {
            match v.folded() {
                Some(c) => c.coords_at(n),
                None => {
                    let mut out = v.a.coords_at(n);
                    out.extend(v.b.coords_at(n));
                    out
                }
            }
        };
        let folds = sqrt_p_cyclo(self.p()).is_some();
        let n = if folds {
            let f = |v: &Self| v.folded().map(|c| c.conductor_exp()).unwrap_or(0);
            f(self).max(f(other))
        } else {
            self.conductor_exp().max(other.conductor_exp())
        };
        let (x, y) = (coords(self, n), coords(other, n));
        let i = y.iter().position(|c| !c.is_zero())?;
        let r = &x[i] / &y[i];
        (*self == other.scale(&r)).then_some(r)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.a.add(&o.a), self.b.add(&o.b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a.sub(&o.a), self.b.sub(&o.b))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.a.neg(), self.b.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p();
        let mut a = self.a.mul(&o.a);
        if !self.b.is_zero() && !o.b.is_zero() {
            a = a.add(&self.b.mul(&o.b).scale(&BigRational::from_integer(p.into())));
        }
        let mut b = CycloScalar::zero(p);
        if !o.b.is_zero() {
            b = b.add(&self.a.mul(&o.b));
        }
        if !self.b.is_zero() {
            b = b.add(&self.b.mul(&o.a));
        }
        Self::new(a, b)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.a.scale(r), self.b.scale(r))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.conj(), self.b.conj())
    }

    pub fn abs_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        let sq = (self.p() as f64).sqrt();
        Ok(self.a.to_complex()? + self.b.to_complex()? * sq)
    }

    /// `sum_j c_j zeta_{p^n}^{e_j}`, accumulated in the group ring.
    pub fn character_sum(p: u32, n: u32, terms: &[(u64, &Self)]) -> Self {
        let top = terms.iter().map(|(_, c)| c.conductor_exp()).max().unwrap_or(0).max(n);
        let len = (p as u64).pow(top);
        let stride = (p as u64).pow(top - n);
        let mut acc_a = GroupRing::new(p, top);
        let mut acc_b = GroupRing::new(p, top);
        for (e, c) in terms {
            let shift = ((e % (p as u64).pow(n)) * stride % len) as usize;
            acc_a.add_shifted(&c.a, shift);
            acc_b.add_shifted(&c.b, shift);
        }
        Self::new(acc_a.finish(), acc_b.finish())
    }
}

impl PartialEq for ScaledScalar {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.sub(other).is_zero()
    }
}

impl fmt::Debug for ScaledScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{:?}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{:?}*sqrt{}", self.b, self.p())
        } else {
            write!(f, "{:?} + {:?}*sqrt{}", self.a, self.b, self.p())
        }
    }
}

impl fmt::Display for ScaledScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{self:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn root_of_unity_examples() {
        assert_eq!(ScaledScalar::root_of_unity(2, &r(0, 1)).unwrap(), ScaledScalar::one(2));
        assert_eq!(
            ScaledScalar::root_of_unity(2, &r(1, 2)).unwrap(),
            ScaledScalar::from_int(2, -1)
        );
        let i = ScaledScalar::root_of_unity(2, &r(1, 4)).unwrap();
        assert!((i.to_complex().unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(matches!(
            ScaledScalar::root_of_unity(3, &r(1, 2)),
            Err(Error::BadPhase(_))
        ));
        let a = ScaledScalar::root_of_unity(3, &r(2, 9)).unwrap();
        let b = ScaledScalar::root_of_unity(3, &r(8, 9)).unwrap();
        assert_eq!(a.mul(&b), ScaledScalar::root_of_unity(3, &r(1, 9)).unwrap());
    }

    #[test]
    fn abs_sq_examples() {
        let z = ScaledScalar::root_of_unity(5, &r(3, 25)).unwrap();
        assert_eq!(z.abs_sq().to_rational(), Some(r(1, 1)));
        let one_plus_i = ScaledScalar::one(2).add(&ScaledScalar::root_of_unity(2, &r(1, 4)).unwrap());
        assert_eq!(one_plus_i.abs_sq().to_rational(), Some(r(2, 1)));
        let w = ScaledScalar::sqrt_q_pow(2, -1).mul(&ScaledScalar::root_of_unity(2, &r(1, 4)).unwrap());
        assert_eq!(w.abs_sq().to_rational(), Some(r(1, 2)));
    }

    #[test]
    fn sqrt_q_arithmetic() {
        for p in [2u32, 3, 5, 7] {
            let s = ScaledScalar::sqrt_q_pow(p, 1);
            assert_eq!(s.mul(&s).to_rational(), Some(r(p as i64, 1)));
            let t = ScaledScalar::sqrt_q_pow(p, -3);
            assert_eq!(s.mul(&t).to_rational(), Some(BigRational::new(1.into(), p.into())));
            assert!(!s.is_zero());
            assert_eq!(s.to_rational(), None);
        }
        let sq2 = ScaledScalar::sqrt_q_pow(2, 1).to_complex().unwrap();
        assert!((sq2.re - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn semantic_equality_across_representations() {
        // sqrt(2) = zeta_8 + zeta_8^7
        let g = ScaledScalar::root_of_unity(2, &r(1, 8))
            .unwrap()
            .add(&ScaledScalar::root_of_unity(2, &r(7, 8)).unwrap());
        assert_eq!(g, ScaledScalar::sqrt_q_pow(2, 1));
        // sqrt(5) as a Gauss sum
        let mut s = ScaledScalar::zero(5);
        for (a, sign) in [(1, 1), (2, -1), (3, -1), (4, 1)] {
            s = s.add(&ScaledScalar::root_of_unity(5, &r(a, 5)).unwrap().scale(&r(sign, 1)));
        }
        assert_eq!(s, ScaledScalar::sqrt_q_pow(5, 1));
    }
}
