//! Exact arithmetic in the dense subring `Z[1/p]` of the p-adic field.
//!
//! Every ball center, coset representative and group coordinate the engine
//! touches is a rational number whose denominator is a power of `p`, so the
//! ring operations stay exact. Inverses of general units are only available
//! modulo a power of `p` (see [`PAdicNumber::unit_inverse_mod`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primality test for the small primes the engine is configured with.
pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `p^e` as a big integer.
pub fn pow_p(p: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// `q^e` as an exact rational, for any integer exponent (here `q = p`).
pub fn q_pow(p: u32, e: i64) -> BigRational {
    let base = pow_p(p, e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// An element `numerator / p^denom_exp` of `Z[1/p]`.
///
/// Canonical: `denom_exp = 0` when the numerator is zero, and otherwise `p`
/// does not divide the numerator unless `denom_exp = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicNumber {
    p: u32,
    num: BigInt,
    den_exp: u32,
}

impl PAdicNumber {
    pub fn new(p: u32, num: impl Into<BigInt>, den_exp: u32) -> Self {
        let mut x = PAdicNumber {
            p,
            num: num.into(),
            den_exp,
        };
        x.normalize();
        x
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::new(p, n, 0)
    }

    pub fn zero(p: u32) -> Self {
        Self::new(p, 0, 0)
    }

    pub fn one(p: u32) -> Self {
        Self::new(p, 1, 0)
    }

    /// The prime power `p^n`, for any integer `n`.
    pub fn prime_power(p: u32, n: i64) -> Self {
        if n >= 0 {
            Self::new(p, pow_p(p, n as u32), 0)
        } else {
            Self::new(p, 1, (-n) as u32)
        }
    }

    /// Exact conversion of a rational with a power-of-`p` denominator.
    pub fn from_rational(p: u32, r: &BigRational) -> Option<Self> {
        let mut den = r.denom().clone();
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&den % &pb).is_zero() {
            den /= &pb;
            e += 1;
        }
        if !den.is_one() {
            return None;
        }
        Some(Self::new(p, r.numer().clone(), e))
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den_exp = 0;
            return;
        }
        let pb = BigInt::from(self.p);
        while self.den_exp > 0 {
            let (q, r) = self.num.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.den_exp -= 1;
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denom_exp(&self) -> u32 {
        self.den_exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `v` with `|x| = q^{-v}`; `None` stands for `+inf` (the zero element).
    pub fn valuation(&self) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        if self.den_exp > 0 {
            return Some(-(self.den_exp as i64));
        }
        let pb = BigInt::from(self.p);
        let mut n = self.num.clone();
        let mut v = 0i64;
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                return Some(v);
            }
            n = q;
            v += 1;
        }
    }

    /// The absolute value `|x| = q^{-v(x)}` (zero for zero).
    pub fn abs(&self) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) => q_pow(self.p, -v),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), pow_p(self.p, self.den_exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / (self.p as f64).powi(self.den_exp as i32)
    }

    /// Multiply by `p^n`.
    pub fn mul_pow_p(&self, n: i64) -> Self {
        if n >= 0 {
            let n = n as u32;
            if n <= self.den_exp {
                Self::new(self.p, self.num.clone(), self.den_exp - n)
            } else {
                Self::new(self.p, &self.num * pow_p(self.p, n - self.den_exp), 0)
            }
        } else {
            Self::new(self.p, self.num.clone(), self.den_exp + (-n) as u32)
        }
    }

    /// Exact division by a nonzero integer, when the quotient stays in `Z[1/p]`.
    pub fn div_exact_int(&self, d: &BigInt) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let mut d = d.clone();
        let mut den_exp = self.den_exp;
        let pb = BigInt::from(self.p);
        while (&d % &pb).is_zero() {
            d /= &pb;
            den_exp += 1;
        }
        let (q, r) = self.num.div_rem(&d);
        if r.is_zero() {
            Some(Self::new(self.p, q, den_exp))
        } else {
            None
        }
    }

    /// Inverse of a unit modulo `P^precision`: the canonical `w` with digits in
    /// positions `[0, precision)` and `u * w = 1 mod P^precision`.
    pub fn unit_inverse_mod(&self, precision: u32) -> Result<Self> {
        if self.valuation() != Some(0) {
            return Err(Error::NotAUnit {
                valuation: self.valuation(),
            });
        }
        // valuation 0 forces den_exp = 0
        let modulus = pow_p(self.p, precision);
        if modulus.is_one() {
            return Ok(Self::zero(self.p));
        }
        let u = self.num.mod_floor(&modulus);
        let ext = u.extended_gcd(&modulus);
        debug_assert!(ext.gcd.is_one());
        Ok(Self::new(self.p, ext.x.mod_floor(&modulus), 0))
    }

    /// The representative of `x + P^k` whose digits at positions `>= k` vanish,
    /// i.e. the unique element of `[0, p^k)` congruent to `x`.
    pub fn canonical_rep(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let e = self.den_exp as i64;
        if k + e <= 0 {
            return Self::zero(self.p);
        }
        let modulus = pow_p(self.p, (k + e) as u32);
        Self::new(self.p, self.num.mod_floor(&modulus), self.den_exp)
    }

    /// True when `x` lies in the ideal `P^k`.
    pub fn in_ideal(&self, k: i64) -> bool {
        match self.valuation() {
            None => true,
            Some(v) => v >= k,
        }
    }

    /// For `x` in `P^l`, the integer `x / p^l`.
    pub fn scaled_index(&self, l: i64) -> BigInt {
        let shift = l + self.den_exp as i64;
        if shift >= 0 {
            &self.num / pow_p(self.p, shift as u32)
        } else {
            &self.num * pow_p(self.p, (-shift) as u32)
        }
    }

    /// The p-adic fractional part as an exact rational in `[0, 1)`.
    ///
    /// The standard character with kernel `D` is `chi(x) = exp(2 pi i phase(x))`.
    pub fn char_phase(&self) -> BigRational {
        if self.den_exp == 0 {
            return BigRational::zero();
        }
        let modulus = pow_p(self.p, self.den_exp);
        BigRational::new(self.num.mod_floor(&modulus), modulus)
    }

    /// Parse `"n/p^e"`, `"n/d"` with `d` a power of `p`, or a bare integer.
    pub fn parse(p: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad p-adic literal {s:?}"));
        match s.split_once('/') {
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Self::new(p, n, 0))
            }
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim();
                if let Some((base, e)) = d.split_once('^') {
                    let base: u32 = base.trim().parse().map_err(|_| bad())?;
                    if base != p {
                        return Err(Error::PrimeMismatch(base, p));
                    }
                    let e: u32 = e.trim().parse().map_err(|_| bad())?;
                    Ok(Self::new(p, n, e))
                } else {
                    let d: BigInt = d.parse().map_err(|_| bad())?;
                    if !d.is_positive() {
                        return Err(bad());
                    }
                    Self::from_rational(p, &BigRational::new(n, d)).ok_or_else(bad)
                }
            }
        }
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing p-adic numbers over different primes");
    }
}

/// The `q^{k-l}` canonical representatives of `P^l / P^k`, ordered by digit value.
pub fn coset_reps(p: u32, l: i64, k: i64) -> Result<Vec<PAdicNumber>> {
    if l > k {
        return Err(Error::BadWindow(format!("coset window P^{l}/P^{k} has l > k")));
    }
    let count = checked_count(p, (k - l) as u32)?;
    let step = PAdicNumber::prime_power(p, l);
    Ok((0..count)
        .map(|j| &PAdicNumber::from_int(p, j as i64) * &step)
        .collect())
}

/// Canonical representatives of `D^* / D_m^*`: the integers in `[1, p^m)` prime
/// to `p`. For `m = 0` the single class of `D^*` itself, represented by 1.
pub fn unit_reps(p: u32, m: u32) -> Vec<PAdicNumber> {
    if m == 0 {
        return vec![PAdicNumber::one(p)];
    }
    let bound = checked_count(p, m).expect("unit group index too large");
    (1..bound)
        .filter(|a| a % p as u64 != 0)
        .map(|a| PAdicNumber::from_int(p, a as i64))
        .collect()
}

/// `p^e` as a machine count, refusing anything past desk scale.
pub(crate) fn checked_count(p: u32, e: u32) -> Result<u64> {
    let mut c: u64 = 1;
    for _ in 0..e {
        c = c
            .checked_mul(p as u64)
            .filter(|c| *c <= 1 << 26)
            .ok_or_else(|| Error::TooLarge(format!("{p}^{e} cosets")))?;
    }
    Ok(c)
}

impl Ord for PAdicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assert_same_prime(other);
        if self.den_exp == other.den_exp {
            return self.num.cmp(&other.num);
        }
        let (a, b) = if self.den_exp > other.den_exp {
            (
                self.num.clone(),
                &other.num * pow_p(self.p, self.den_exp - other.den_exp),
            )
        } else {
            (
                &self.num * pow_p(self.p, other.den_exp - self.den_exp),
                other.num.clone(),
            )
        };
        a.cmp(&b)
    }
}

impl PartialOrd for PAdicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.num, self.p, self.den_exp)
    }
}

impl fmt::Debug for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn add(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self.assert_same_prime(rhs);
        let e = self.den_exp.max(rhs.den_exp);
        let a = &self.num * pow_p(self.p, e - self.den_exp);
        let b = &rhs.num * pow_p(self.p, e - rhs.den_exp);
        PAdicNumber::new(self.p, a + b, e)
    }
}

impl<'a> Sub<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn sub(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn mul(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self.assert_same_prime(rhs);
        PAdicNumber::new(self.p, &self.num * &rhs.num, self.den_exp + rhs.den_exp)
    }
}

impl Neg for &PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        PAdicNumber {
            p: self.p,
            num: -&self.num,
            den_exp: self.den_exp,
        }
    }
}

impl Add for PAdicNumber {
    type Output = PAdicNumber;
    fn add(self, rhs: PAdicNumber) -> PAdicNumber {
        &self + &rhs
    }
}

impl Sub for PAdicNumber {
    type Output = PAdicNumber;
    fn sub(self, rhs: PAdicNumber) -> PAdicNumber {
        &self - &rhs
    }
}

impl Mul for PAdicNumber {
    type Output = PAdicNumber;
    fn mul(self, rhs: PAdicNumber) -> PAdicNumber {
        &self * &rhs
    }
}

impl Neg for PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        -&self
    }
}

/// The ball `center + P^scale`: radius `q^{-scale}`, additive Haar measure
/// `q^{-scale}`. The center is kept canonical modulo `P^scale`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Ball {
    center: PAdicNumber,
    scale: i64,
}

impl Ball {
    pub fn new(center: &PAdicNumber, scale: i64) -> Self {
        Ball {
            center: center.canonical_rep(scale),
            scale,
        }
    }

    pub fn center(&self) -> &PAdicNumber {
        &self.center
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn p(&self) -> u32 {
        self.center.p()
    }

    pub fn measure(&self) -> BigRational {
        q_pow(self.center.p(), -self.scale)
    }

    pub fn contains(&self, x: &PAdicNumber) -> bool {
        x.canonical_rep(self.scale) == self.center
    }

    /// True when `self` is contained in `other`.
    pub fn is_within(&self, other: &Ball) -> bool {
        self.scale >= other.scale && other.contains(&self.center)
    }

    pub fn is_disjoint(&self, other: &Ball) -> bool {
        !self.is_within(other) && !other.is_within(self)
    }

    /// The `q^{scale - self.scale}` sub-balls at a finer scale.
    pub fn children(&self, scale: i64) -> Result<Vec<Ball>> {
        if scale < self.scale {
            return Err(Error::BadWindow(format!(
                "cannot refine scale {} to coarser scale {scale}",
                self.scale
            )));
        }
        Ok(coset_reps(self.p(), self.scale, scale)?
            .into_iter()
            .map(|t| Ball {
                center: (&self.center + &t).canonical_rep(scale),
                scale,
            })
            .collect())
    }

    /// Smallest valuation attained on the ball.
    pub fn min_valuation(&self) -> i64 {
        self.center.valuation().unwrap_or(self.scale).min(self.scale)
    }
}

impl Ord for Ball {
    fn cmp(&self, other: &Self) -> Ordering {
        self.scale
            .cmp(&other.scale)
            .then_with(|| self.center.cmp(&other.center))
    }
}

impl PartialOrd for Ball {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rational absolute value helper used by weights: `|x|` as a float.
pub fn abs_f64(x: &PAdicNumber) -> f64 {
    match x.valuation() {
        None => 0.0,
        Some(v) => (x.p() as f64).powi(-v as i32),
    }
}
