//! Test functions on `Q_p` as exact step functions.
//!
//! A [`StepFunction`] is stored at a single resolution `k`: a map from
//! canonical centers of `P^k`-cosets to nonzero coefficients. Every operation
//! brings its operands to a common resolution first, which keeps disjointness
//! trivial and inner products a single pass.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::padic::{coset_reps, q_pow, Ball, PAdicNumber};
use crate::scalars::{Scalar, ScaledScalar};

#[derive(Clone)]
pub struct StepFunction<S: Scalar = ScaledScalar> {
    p: u32,
    resolution: i64,
    terms: BTreeMap<PAdicNumber, S>,
}

impl<S: Scalar> StepFunction<S> {
    pub fn zero(p: u32, resolution: i64) -> Self {
        StepFunction {
            p,
            resolution,
            terms: BTreeMap::new(),
        }
    }

    /// Constant `c` on the ball `center + P^scale`.
    pub fn ball(p: u32, center: &PAdicNumber, scale: i64, c: S) -> Self {
        let mut f = Self::zero(p, scale);
        f.accumulate(center, c);
        f
    }

    /// The indicator of `P^k`.
    pub fn ideal_indicator(p: u32, k: i64) -> Self {
        Self::ball(p, &PAdicNumber::zero(p), k, S::one(p))
    }

    /// Values on `P^k`-cosets given by arbitrary representatives; repeated
    /// cosets are summed.
    pub fn from_values<I>(p: u32, resolution: i64, values: I) -> Self
    where
        I: IntoIterator<Item = (PAdicNumber, S)>,
    {
        let mut f = Self::zero(p, resolution);
        for (c, v) in values {
            f.accumulate(&c, v);
        }
        f
    }

    /// Normal form of a superposition of (possibly nested) ball indicators:
    /// every ball is refined to the finest scale present and overlapping
    /// contributions add up.
    pub fn canonicalize(p: u32, terms: &[(Ball, S)], coarsen: bool) -> Result<Self> {
        let Some(res) = terms.iter().map(|(b, _)| b.scale()).max() else {
            return Ok(Self::zero(p, 0));
        };
        let mut f = Self::zero(p, res);
        for (b, c) in terms {
            if b.p() != p {
                return Err(Error::PrimeMismatch(b.p(), p));
            }
            for child in b.children(res)? {
                f.accumulate(child.center(), c.clone());
            }
        }
        Ok(if coarsen { f.coarsen() } else { f })
    }

    fn accumulate(&mut self, x: &PAdicNumber, v: S) {
        assert_eq!(x.p(), self.p, "center over a different prime");
        if v.is_zero() {
            return;
        }
        let c = x.canonical_rep(self.resolution);
        match self.terms.get_mut(&c) {
            Some(old) => {
                let s = old.add(&v);
                if s.is_zero() {
                    self.terms.remove(&c);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(c, v);
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn resolution(&self) -> i64 {
        self.resolution
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical centers and their coefficients, in ascending center order.
    pub fn terms(&self) -> impl Iterator<Item = (&PAdicNumber, &S)> {
        self.terms.iter()
    }

    pub fn balls(&self) -> impl Iterator<Item = (Ball, &S)> + '_ {
        self.terms.iter().map(move |(c, v)| (Ball::new(c, self.resolution), v))
    }

    /// Largest `l` with support inside `P^l`; `None` for the zero function.
    pub fn support_exponent(&self) -> Option<i64> {
        self.terms
            .keys()
            .map(|c| c.valuation().map_or(self.resolution, |v| v.min(self.resolution)))
            .min()
    }

    /// The same function stored at a finer resolution.
    pub fn refine(&self, k: i64) -> Result<Self> {
        if k < self.resolution {
            return Err(Error::BadWindow(format!(
                "cannot refine resolution {} to {k}",
                self.resolution
            )));
        }
        if k == self.resolution {
            return Ok(self.clone());
        }
        let offsets = coset_reps(self.p, self.resolution, k)?;
        let mut terms = BTreeMap::new();
        for (c, v) in &self.terms {
            for t in &offsets {
                terms.insert((c + t).canonical_rep(k), v.clone());
            }
        }
        Ok(StepFunction {
            p: self.p,
            resolution: k,
            terms,
        })
    }

    /// Merge sibling cosets with equal values until no merge is possible; the
    /// result sits at the minimal resolution.
    pub fn coarsen(&self) -> Self {
        let mut f = self.clone();
        if f.terms.is_empty() {
            return f;
        }
        loop {
            let r = f.resolution - 1;
            let mut groups: BTreeMap<PAdicNumber, Vec<&S>> = BTreeMap::new();
            for (c, v) in &f.terms {
                groups.entry(c.canonical_rep(r)).or_default().push(v);
            }
            let mergeable = groups
                .values()
                .all(|vs| vs.len() == f.p as usize && vs.iter().all(|v| v.same_value(vs[0])));
            if !mergeable {
                return f;
            }
            let terms = groups.into_iter().map(|(c, vs)| (c, vs[0].clone())).collect();
            f = StepFunction {
                p: f.p,
                resolution: r,
                terms,
            };
        }
    }

    /// `(l, k)`: minimal `k` and maximal `l` with the function in `S_l^k`.
    pub fn membership_class(&self) -> Result<(i64, i64)> {
        let l = self.support_exponent().ok_or(Error::ZeroFunction)?;
        Ok((l, self.coarsen().resolution))
    }

    pub fn evaluate(&self, x: &PAdicNumber) -> S {
        self.terms
            .get(&x.canonical_rep(self.resolution))
            .cloned()
            .unwrap_or_else(|| S::zero(self.p))
    }

    /// Value on a whole ball, provided the function is constant there.
    pub fn value_on_ball(&self, b: &Ball) -> Option<S> {
        if b.scale() >= self.resolution {
            return Some(self.evaluate(b.center()));
        }
        let kids = b.children(self.resolution).ok()?;
        let first = self.evaluate(kids[0].center());
        kids.iter()
            .all(|k| self.evaluate(k.center()).same_value(&first))
            .then_some(first)
    }

    pub fn integral(&self) -> S {
        let total = self.terms.values().fold(S::zero(self.p), |acc, v| acc.add(v));
        total.scale_rational(&q_pow(self.p, -self.resolution))
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "step functions over different primes");
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        self.check_prime(other);
        let res = self.resolution.max(other.resolution);
        let mut out = self.refine(res).expect("refinement to finer scale");
        let b = other.refine(res).expect("refinement to finer scale");
        for (c, v) in b.terms {
            out.accumulate(&c, if sign { v } else { v.neg() });
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.p, self.resolution);
        for (x, v) in &self.terms {
            out.accumulate(x, v.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&S::from_rational(self.p, r))
    }

    pub fn neg(&self) -> Self {
        StepFunction {
            p: self.p,
            resolution: self.resolution,
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v.neg())).collect(),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        StepFunction {
            p: self.p,
            resolution: self.resolution,
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v.conj())).collect(),
        }
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        StepFunction {
            p: self.p,
            resolution: self.resolution,
            terms: self
                .terms
                .iter()
                .map(|(c, v)| ((-c).canonical_rep(self.resolution), v.clone()))
                .collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        self.check_prime(other);
        let (fine, coarse) = if self.resolution >= other.resolution {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::zero(self.p, fine.resolution);
        for (c, v) in &fine.terms {
            if let Some(w) = coarse.terms.get(&c.canonical_rep(coarse.resolution)) {
                out.accumulate(c, v.mul(w));
            }
        }
        out
    }

    /// `<f, g> = int f conj(g)`.
    pub fn inner_product(&self, other: &Self) -> S {
        self.check_prime(other);
        let p = self.p;
        let (res, sum) = if self.resolution >= other.resolution {
            let mut acc = S::zero(p);
            for (c, v) in &self.terms {
                if let Some(w) = other.terms.get(&c.canonical_rep(other.resolution)) {
                    acc = acc.add(&v.mul(&w.conj()));
                }
            }
            (self.resolution, acc)
        } else {
            let mut acc = S::zero(p);
            for (c, w) in &other.terms {
                if let Some(v) = self.terms.get(&c.canonical_rep(self.resolution)) {
                    acc = acc.add(&v.mul(&w.conj()));
                }
            }
            (other.resolution, acc)
        };
        sum.scale_rational(&q_pow(p, -res))
    }

    /// `||f||_2^2` in the scalar backend.
    pub fn norm_sq(&self) -> S {
        let acc = self.terms.values().fold(S::zero(self.p), |acc, v| acc.add(&v.abs_sq()));
        acc.scale_rational(&q_pow(self.p, -self.resolution))
    }

    /// `||f||_s` for `s` in `(0, inf]`, as a float.
    pub fn lp_norm(&self, s: f64) -> f64 {
        if s.is_infinite() {
            return self.terms.values().map(|v| v.abs_sq_f64().sqrt()).fold(0.0, f64::max);
        }
        let mu = q_pow(self.p, -self.resolution).to_f64().unwrap_or(f64::NAN);
        let sum: f64 = self.terms.values().map(|v| v.abs_sq_f64().powf(s / 2.0)).sum();
        (mu * sum).powf(1.0 / s)
    }

    /// Sum of the coefficients over the cosets of `P^k` (`k` coarser than the
    /// resolution); the values of the aggregated function are un-normalized.
    fn aggregate(&self, k: i64) -> BTreeMap<PAdicNumber, S> {
        let mut out: BTreeMap<PAdicNumber, S> = BTreeMap::new();
        for (c, v) in &self.terms {
            let key = c.canonical_rep(k);
            match out.get_mut(&key) {
                Some(old) => *old = old.add(v),
                None => {
                    out.insert(key, v.clone());
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Exact convolution via `1_{c1+P^k1} * 1_{c2+P^k2} = q^{-max} 1_{c1+c2+P^min}`.
    pub fn convolve(&self, other: &Self) -> Self {
        self.check_prime(other);
        let (fine, coarse) = if self.resolution >= other.resolution {
            (self, other)
        } else {
            (other, self)
        };
        let k = coarse.resolution;
        let agg = fine.aggregate(k);
        let mut out = Self::zero(self.p, k);
        for (c1, v1) in &agg {
            for (c2, v2) in &coarse.terms {
                out.accumulate(&(c1 + c2), v1.mul(v2));
            }
        }
        out.scale_rational(&q_pow(self.p, -fine.resolution))
    }

    /// `pi(x, h) f (y) = |h|^{-1/2} f(h^{-1}(y - x))`.
    pub fn pi_apply(&self, x: &PAdicNumber, h: &PAdicNumber) -> Result<Self> {
        let v = h.valuation().ok_or(Error::ZeroDilation)?;
        let res = self.resolution + v;
        let factor = S::sqrt_q_pow(self.p, v);
        let mut terms = BTreeMap::new();
        for (c, val) in &self.terms {
            let center = (x + &(h * c)).canonical_rep(res);
            terms.insert(center, val.mul(&factor));
        }
        Ok(StepFunction {
            p: self.p,
            resolution: res,
            terms,
        })
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> StepFunction<T> {
        let mut out = StepFunction::zero(self.p, self.resolution);
        for (c, v) in &self.terms {
            out.accumulate(c, f(v));
        }
        out
    }

    /// Float embedding of the coefficients.
    pub fn to_float(&self) -> Result<StepFunction<Complex64>> {
        let mut out = StepFunction::zero(self.p, self.resolution);
        for (c, v) in &self.terms {
            out.accumulate(c, v.to_complex()?);
        }
        Ok(out)
    }
}

impl StepFunction<ScaledScalar> {
    /// `||f||_2^2` as a rational, when it is one.
    pub fn norm_sq_rational(&self) -> Option<BigRational> {
        self.norm_sq().to_rational()
    }
}

/// Exact equality of functions, independent of the stored resolution.
impl<S: Scalar> PartialEq for StepFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.sub(other).is_zero()
    }
}

impl<S: Scalar> fmt::Debug for StepFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction(p={}, k={}) {{", self.p, self.resolution)?;
        for (i, (c, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c}: {v:?}")?;
        }
        write!(f, " }}")
    }
}

/// `1_D - q 1_P`, the basic mean-zero step function.
pub fn basic_wavelet(p: u32) -> StepFunction {
    let one = StepFunction::ideal_indicator(p, 0);
    let inner = StepFunction::ideal_indicator(p, 1);
    one.sub(&inner.scale_rational(&BigRational::from_integer(p.into())))
}

/// True when the integral vanishes.
pub fn is_s0<S: Scalar>(f: &StepFunction<S>) -> bool {
    f.integral().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = StepFunction;

    fn n(p: u32, num: i64, e: u32) -> PAdicNumber {
        PAdicNumber::new(p, num, e)
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn int(p: u32, k: i64) -> ScaledScalar {
        ScaledScalar::from_int(p, k)
    }

    #[test]
    fn canonicalize_examples() {
        let d = Ball::new(&n(2, 0, 0), 1);
        let o = Ball::new(&n(2, 1, 0), 1);
        let f = F::canonicalize(2, &[(d, int(2, 1)), (o, int(2, 1))], true).unwrap();
        assert_eq!(f.resolution(), 0);
        assert_eq!(f, F::ideal_indicator(2, 0));

        let nested = F::canonicalize(
            3,
            &[
                (Ball::new(&n(3, 0, 0), 0), int(3, 1)),
                (Ball::new(&n(3, 0, 0), 1), int(3, -3)),
            ],
            false,
        )
        .unwrap();
        assert_eq!(nested.evaluate(&n(3, 0, 0)), int(3, -2));
        assert_eq!(nested.evaluate(&n(3, 1, 0)), int(3, 1));
        assert!(F::canonicalize(2, &[], false).unwrap().is_zero());
    }

    #[test]
    fn evaluate_basic_wavelet() {
        let g = basic_wavelet(2);
        assert_eq!(g.evaluate(&n(2, 0, 0)), int(2, -1));
        assert_eq!(g.evaluate(&n(2, 1, 0)), int(2, 1));
        assert!(g.evaluate(&n(2, 1, 1)).is_zero());
    }

    #[test]
    fn integrals() {
        for k in -2..3 {
            assert_eq!(F::ideal_indicator(3, k).integral().to_rational(), Some(q_pow(3, -k)));
        }
        assert!(basic_wavelet(5).integral().is_zero());
        assert!(is_s0(&basic_wavelet(2)));
    }

    #[test]
    fn inner_products() {
        for p in [2u32, 3, 5] {
            let g = basic_wavelet(p);
            assert_eq!(g.norm_sq_rational(), Some(r(p as i64 - 1, 1)));
            assert_eq!(g.inner_product(&g).to_rational(), Some(r(p as i64 - 1, 1)));
        }
        let a = F::ball(2, &n(2, 0, 0), 1, int(2, 1));
        let b = F::ball(2, &n(2, 1, 0), 1, int(2, 1));
        assert!(a.inner_product(&b).is_zero());
        // corollary wavelet k=1 at p=2 against its unit translate
        let g = a.sub(&b);
        let shifted = g.pi_apply(&n(2, 1, 0), &n(2, 1, 0)).unwrap();
        assert_eq!(g.inner_product(&shifted), int(2, -1));
    }

    #[test]
    fn lp_norms() {
        let f = F::ideal_indicator(2, 3);
        assert!((f.lp_norm(3.0) - 2f64.powf(-1.0)).abs() < 1e-12);
        assert!((f.lp_norm(f64::INFINITY) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_examples() {
        let d = F::ideal_indicator(3, 0);
        assert_eq!(d.convolve(&d), d);
        let a = F::ball(2, &n(2, 1, 1), -1, int(2, 1));
        let b = F::ball(2, &n(2, 3, 0), 2, int(2, 1));
        // q^{-2} on (1/2 + 3) + P^{-1}
        let expected = F::ball(2, &n(2, 7, 1), -1, ScaledScalar::from_rational(2, &r(1, 4)));
        assert_eq!(a.convolve(&b), expected);
    }

    #[test]
    fn membership() {
        assert_eq!(F::ideal_indicator(2, 0).membership_class(), Ok((0, 0)));
        assert_eq!(basic_wavelet(3).membership_class(), Ok((0, 1)));
        assert_eq!(F::zero(2, 0).membership_class(), Err(Error::ZeroFunction));
    }

    #[test]
    fn pi_examples() {
        let d = F::ideal_indicator(2, 0);
        assert_eq!(d.pi_apply(&n(2, 0, 0), &n(2, 1, 0)).unwrap(), d);
        let dilated = d.pi_apply(&n(2, 0, 0), &n(2, 1, 1)).unwrap();
        let expected = F::ideal_indicator(2, -1).scale(&ScaledScalar::sqrt_q_pow(2, -1));
        assert_eq!(dilated, expected);
        assert_eq!(d.pi_apply(&n(2, 0, 0), &n(2, 0, 0)), Err(Error::ZeroDilation));
        let g = basic_wavelet(3);
        let moved = g.pi_apply(&n(3, 5, 2), &n(3, 7, 1)).unwrap();
        assert_eq!(moved.norm_sq(), g.norm_sq());
    }

    #[test]
    fn reflect_and_refine() {
        let f = F::ball(3, &n(3, 1, 1), 0, int(3, 2));
        let g = f.reflect();
        assert_eq!(g.evaluate(&n(3, 2, 1)), int(3, 2));
        assert_eq!(f.refine(2).unwrap(), f);
        assert_eq!(f.refine(2).unwrap().len(), 9);
    }
}
