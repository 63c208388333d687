use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest conductor the float embedding accepts.
pub const MAX_FLOAT_CONDUCTOR: u64 = 1 << 20;

fn upow(p: u32, e: u32) -> usize {
    (p as usize).pow(e)
}

/// Degree of the p^n-th cyclotomic field.
pub fn phi(p: u32, n: u32) -> usize {
    if n == 0 {
        1
    } else {
        upow(p, n - 1) * (p as usize - 1)
    }
}

/// An element of `Q(zeta)` for a primitive `p^n`-th root of unity, stored as
/// integer coordinates over the power basis `1, zeta, .., zeta^{phi-1}` and a
/// common positive denominator.
///
/// Normal form: the conductor is minimal, coordinates and denominator are
/// coprime, and zero is `n = 0, [0] / 1`. Structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    p: u32,
    n: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloScalar {
    pub fn zero(p: u32) -> Self {
        CycloScalar {
            p,
            n: 0,
            num: vec![BigInt::zero()],
            den: BigInt::one(),
        }
    }

    pub fn from_rational(p: u32, r: &BigRational) -> Self {
        CycloScalar {
            p,
            n: 0,
            num: vec![r.numer().clone()],
            den: r.denom().clone(),
        }
    }

    pub fn from_int(p: u32, k: i64) -> Self {
        Self::from_rational(p, &BigRational::from_integer(k.into()))
    }

    /// `zeta_{p^n}^e`.
    pub fn root(p: u32, n: u32, e: u64) -> Self {
        let len = upow(p, n);
        let mut v = vec![BigInt::zero(); len];
        v[(e % len as u64) as usize] = BigInt::one();
        Self::from_group_ring(p, n, v, BigInt::one())
    }

    /// Coordinates and denominator over the `p^n` group ring basis, reduced.
    pub(crate) fn from_group_ring(p: u32, n: u32, mut v: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(v.len(), upow(p, n));
        let f = phi(p, n);
        if n >= 1 {
            let block = upow(p, n - 1);
            for t in 0..block {
                let c = std::mem::take(&mut v[f + t]);
                if c.is_zero() {
                    continue;
                }
                for i in 0..(p as usize - 1) {
                    v[i * block + t] -= &c;
                }
            }
        }
        v.truncate(f);
        let mut out = CycloScalar { p, n, num: v, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            *self = Self::zero(self.p);
            return;
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        let p = self.p as usize;
        loop {
            if self.n >= 2 {
                if self.num.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
                    break;
                }
                let v: Vec<BigInt> = self.num.iter().step_by(p).cloned().collect();
                self.num = v;
                self.n -= 1;
            } else if self.n == 1 {
                if self.num.iter().skip(1).any(|c| !c.is_zero()) {
                    break;
                }
                self.num.truncate(1);
                self.n = 0;
            } else {
                break;
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn conductor_exp(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.num[0].is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        (self.n == 0).then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// Coordinates after embedding into conductor `p^target` (`target >= n`).
    pub fn coords_at(&self, target: u32) -> Vec<BigRational> {
        assert!(target >= self.n);
        let stride = upow(self.p, target - self.n);
        let mut out = vec![BigRational::zero(); phi(self.p, target)];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                out[i * stride] = BigRational::new(c.clone(), self.den.clone());
            }
        }
        out
    }

    /// Build from power-basis rational coordinates at conductor `p^n`.
    pub fn from_coords(p: u32, n: u32, coords: &[BigRational]) -> Result<Self> {
        if coords.len() != phi(p, n) {
            return Err(Error::Parse(format!(
                "expected {} coordinates for conductor {p}^{n}, got {}",
                phi(p, n),
                coords.len()
            )));
        }
        let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut v: Vec<BigInt> = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        v.resize(upow(p, n), BigInt::zero());
        Ok(Self::from_group_ring(p, n, v, den))
    }

    pub fn neg(&self) -> Self {
        CycloScalar {
            p: self.p,
            n: self.n,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut acc = GroupRing::new(self.p, self.n.max(other.n));
        acc.add_shifted(self, 0);
        acc.add_shifted(other, 0);
        acc.finish()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        if self.n == 0 {
            return other.scale_frac(&self.num[0], &self.den);
        }
        if other.n == 0 {
            return self.scale_frac(&other.num[0], &other.den);
        }
        let n = self.n.max(other.n);
        let len = upow(self.p, n);
        let sa = upow(self.p, n - self.n);
        let sb = upow(self.p, n - other.n);
        let mut v = vec![BigInt::zero(); len];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                v[(i * sa + j * sb) % len] += a * b;
            }
        }
        Self::from_group_ring(self.p, n, v, &self.den * &other.den)
    }

    fn scale_frac(&self, num: &BigInt, den: &BigInt) -> Self {
        let mut out = CycloScalar {
            p: self.p,
            n: self.n,
            num: self.num.iter().map(|c| c * num).collect(),
            den: &self.den * den,
        };
        out.normalize();
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero(self.p);
        }
        self.scale_frac(r.numer(), r.denom())
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        if self.n == 0 {
            return self.clone();
        }
        let len = upow(self.p, self.n);
        let mut v = vec![BigInt::zero(); len];
        for (i, c) in self.num.iter().enumerate() {
            v[(len - i) % len] = c.clone();
        }
        Self::from_group_ring(self.p, self.n, v, self.den.clone())
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        let len = upow(self.p, self.n) as u64;
        if len > MAX_FLOAT_CONDUCTOR {
            return Err(Error::ConductorTooLarge { p: self.p, exp: self.n });
        }
        let mut z = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = BigRational::new(c.clone(), self.den.clone())
                .to_f64()
                .unwrap_or(f64::NAN);
            let ang = std::f64::consts::TAU * i as f64 / len as f64;
            z += Complex64::from_polar(w, ang);
        }
        Ok(z)
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        write!(f, "(")?;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "{}*z{}^{}",
                BigRational::new(c.clone(), self.den.clone()),
                upow(self.p, self.n),
                i
            )?;
        }
        write!(f, ")")
    }
}

/// Accumulator over the group ring `Q[Z/p^n]`: sums of shifted cyclotomic
/// values are collected unreduced and reduced once at the end.
pub(crate) struct GroupRing {
    p: u32,
    n: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl GroupRing {
    pub fn new(p: u32, n: u32) -> Self {
        GroupRing {
            p,
            n,
            num: vec![BigInt::zero(); upow(p, n)],
            den: BigInt::one(),
        }
    }

    /// Add `x * zeta_{p^n}^shift`.
    pub fn add_shifted(&mut self, x: &CycloScalar, shift: usize) {
        if x.is_zero() {
            return;
        }
        assert!(x.n <= self.n, "group ring conductor too small");
        let factor = if (&self.den % &x.den).is_zero() {
            &self.den / &x.den
        } else {
            let l = self.den.lcm(&x.den);
            let up = &l / &self.den;
            for c in &mut self.num {
                if !c.is_zero() {
                    *c *= &up;
                }
            }
            self.den = l;
            &self.den / &x.den
        };
        let len = self.num.len();
        let stride = upow(self.p, self.n - x.n);
        for (i, c) in x.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (i * stride + shift) % len;
            if factor.is_one() {
                self.num[idx] += c;
            } else {
                self.num[idx] += c * &factor;
            }
        }
    }

    pub fn finish(self) -> CycloScalar {
        CycloScalar::from_group_ring(self.p, self.n, self.num, self.den)
    }
}
