//! The affine group `G = K x| K*` with law `(x,h)(y,k) = (hy + x, hk)`,
//! its special compact open subgroups `P^k x D_m^*` and their systems of
//! left-coset representatives.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::padic::{coset_reps, q_pow, unit_reps, PAdicNumber};
use crate::scalars::Scalar;
use crate::stepfn::StepFunction;

/// Default precision for unit inverses.
pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    x: PAdicNumber,
    h: PAdicNumber,
}

impl GroupElement {
    pub fn new(x: PAdicNumber, h: PAdicNumber) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::ZeroDilation);
        }
        assert_eq!(x.p(), h.p());
        Ok(GroupElement { x, h })
    }

    pub fn identity(p: u32) -> Self {
        GroupElement {
            x: PAdicNumber::zero(p),
            h: PAdicNumber::one(p),
        }
    }

    pub fn translation(x: PAdicNumber) -> Self {
        let p = x.p();
        GroupElement {
            x,
            h: PAdicNumber::one(p),
        }
    }

    pub fn dilation(h: PAdicNumber) -> Result<Self> {
        let p = h.p();
        Self::new(PAdicNumber::zero(p), h)
    }

    pub fn p(&self) -> u32 {
        self.x.p()
    }

    pub fn x(&self) -> &PAdicNumber {
        &self.x
    }

    pub fn h(&self) -> &PAdicNumber {
        &self.h
    }

    /// `v(h)`.
    pub fn dilation_exponent(&self) -> i64 {
        self.h.valuation().expect("dilation is nonzero")
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupElement {
            x: &(&self.h * &other.x) + &self.x,
            h: &self.h * &other.h,
        }
    }

    /// `(-h^{-1} x, h^{-1})`, exact when the unit part of `h` is `+-1`,
    /// otherwise with the unit part inverted modulo `P^precision`.
    pub fn inv(&self, precision: u32) -> Self {
        let h_inv = inverse_mod(&self.h, precision);
        GroupElement {
            x: -&(&h_inv * &self.x),
            h: h_inv,
        }
    }

    /// `Delta_G(x,h) = 1/|h|`.
    pub fn modular(&self) -> BigRational {
        q_pow(self.p(), self.dilation_exponent())
    }

    pub fn act<S: Scalar>(&self, f: &StepFunction<S>) -> Result<StepFunction<S>> {
        f.pi_apply(&self.x, &self.h)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.h)
    }
}

/// Splits `h = p^v u` with `u` an integer unit.
fn split_unit(h: &PAdicNumber) -> (i64, BigInt) {
    let v = h.valuation().expect("nonzero");
    let u = h.mul_pow_p(-v);
    debug_assert_eq!(u.denom_exp(), 0);
    (v, u.numerator().clone())
}

/// `h^{-1}`, with the unit part inverted modulo `P^precision` unless it is `+-1`.
fn inverse_mod(h: &PAdicNumber, precision: u32) -> PAdicNumber {
    let p = h.p();
    let (v, u) = split_unit(h);
    let u_inv = if u.abs().is_one() {
        PAdicNumber::new(p, u, 0)
    } else {
        PAdicNumber::new(p, u, 0)
            .unit_inverse_mod(precision)
            .expect("unit part has valuation zero")
    };
    u_inv.mul_pow_p(-v)
}

/// Left Haar mass of `P^k x D_m^*` under `dmu_G = dx dh / |h|^2` (additive
/// `dh`): `q^{-k-m}` for `m >= 1`, `q^{-k}(1 - 1/q)` for the full unit group.
pub fn haar_box(p: u32, k: i64, m: u32) -> BigRational {
    if m == 0 {
        q_pow(p, -k) * (BigRational::one() - q_pow(p, -1))
    } else {
        q_pow(p, -k - m as i64)
    }
}

/// The box `P^k x D_m^*`; `m = 0` stands for the full unit group `D^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpecialSubgroup {
    pub k: i64,
    pub m: u32,
}

impl SpecialSubgroup {
    pub fn new(k: i64, m: u32) -> Self {
        SpecialSubgroup { k, m }
    }

    pub fn measure(&self, p: u32) -> BigRational {
        haar_box(p, self.k, self.m)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        let p = g.p();
        if !g.x.in_ideal(self.k) || g.h.valuation() != Some(0) {
            return false;
        }
        self.m == 0 || (&g.h - &PAdicNumber::one(p)).in_ideal(self.m as i64)
    }

    /// `u^{-1} w` in the subgroup, decided without inverting units.
    pub fn same_left_coset(&self, u: &GroupElement, w: &GroupElement) -> bool {
        let vh = u.dilation_exponent();
        let dil = if self.m == 0 {
            w.dilation_exponent() == vh
        } else {
            (&w.h - &u.h).in_ideal(self.m as i64 + vh)
        };
        dil && (&w.x - &u.x).in_ideal(self.k + vh)
    }

    /// Unit representatives `Lambda_m` of `D^* / D_m^*`.
    pub fn unit_reps(&self, p: u32) -> Vec<PAdicNumber> {
        unit_reps(p, self.m)
    }
}

/// The subgroup of `G` fixing `g`: `P^k x D_{k-l}^*` for `g` in class `(l,k)`.
pub fn fixed_subgroup<S: Scalar>(g: &StepFunction<S>) -> Result<SpecialSubgroup> {
    let (l, k) = g.membership_class()?;
    Ok(SpecialSubgroup::new(k, (k - l) as u32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationPart {
    Zero,
    Ideal(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DilationPart {
    /// `D_m^*`, with `m = 0` the full unit group.
    Units(u32),
    /// All of `K^*`.
    All,
}

/// Whether `H1 x H2` is a subgroup, i.e. `H2 H1 = H1`.
pub fn is_subgroup_box(h1: TranslationPart, h2: DilationPart) -> bool {
    match (h1, h2) {
        (TranslationPart::Zero, _) => true,
        (TranslationPart::Ideal(_), DilationPart::Units(_)) => true,
        (TranslationPart::Ideal(_), DilationPart::All) => false,
    }
}

/// A representative `(p^n lambda gamma, p^n lambda)` of a left coset of a
/// special subgroup, ordered by `(n, lambda, gamma)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rep {
    pub n: i64,
    pub lambda: PAdicNumber,
    pub gamma: PAdicNumber,
}

impl Rep {
    pub fn element(&self) -> GroupElement {
        let h = self.lambda.mul_pow_p(self.n);
        GroupElement { x: &h * &self.gamma, h }
    }

    /// The canonical representative of the left coset `g H`.
    pub fn locate(g: &GroupElement, sub: &SpecialSubgroup) -> Rep {
        let p = g.p();
        let (n, u) = split_unit(&g.h);
        let lambda = if sub.m == 0 {
            PAdicNumber::one(p)
        } else {
            PAdicNumber::new(p, u, 0).canonical_rep(sub.m as i64)
        };
        // gamma = x / (p^n lambda) mod P^k
        let y = g.x.mul_pow_p(-n);
        let gamma = match y.valuation() {
            None => PAdicNumber::zero(p),
            Some(vy) => {
                let precision = (sub.k - vy).max(0) as u32;
                let lam_inv = if lambda.numerator().is_one() {
                    PAdicNumber::one(p)
                } else {
                    lambda.unit_inverse_mod(precision).expect("representative is a unit")
                };
                (&y * &lam_inv).canonical_rep(sub.k)
            }
        };
        Rep { n, lambda, gamma }
    }

    /// Parse back from a group element already in representative form.
    pub fn from_element(g: &GroupElement, sub: &SpecialSubgroup) -> Result<Rep> {
        let r = Rep::locate(g, sub);
        if r.element() != *g {
            return Err(Error::Parse(format!(
                "{g:?} is not a canonical coset representative for P^{} x D_{}^*",
                sub.k, sub.m
            )));
        }
        Ok(r)
    }
}

impl Ord for Rep {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lambda.cmp(&other.lambda))
            .then_with(|| self.gamma.cmp(&other.gamma))
    }
}

impl PartialOrd for Rep {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.element())
    }
}

/// A finite window of a special system of representatives: `n` in
/// `[n_range.0, n_range.1]`, `lambda` in `Lambda_m`, `gamma` in `P^l / P^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepSystem {
    pub p: u32,
    pub subgroup: SpecialSubgroup,
    pub n_range: (i64, i64),
    pub gamma_window: (i64, i64),
}

impl RepSystem {
    pub fn new(p: u32, subgroup: SpecialSubgroup, n_range: (i64, i64), gamma_window: (i64, i64)) -> Result<Self> {
        if n_range.0 > n_range.1 {
            return Err(Error::BadWindow(format!("empty n range {n_range:?}")));
        }
        if gamma_window.1 != subgroup.k {
            return Err(Error::BadWindow(format!(
                "gamma window must end at the translation scale {}, got {}",
                subgroup.k, gamma_window.1
            )));
        }
        if gamma_window.0 > gamma_window.1 {
            return Err(Error::BadWindow(format!("empty gamma window {gamma_window:?}")));
        }
        Ok(RepSystem {
            p,
            subgroup,
            n_range,
            gamma_window,
        })
    }

    /// All representatives in the window, sorted by `(n, lambda, gamma)`.
    pub fn reps(&self) -> Result<Vec<Rep>> {
        let gammas = coset_reps(self.p, self.gamma_window.0, self.gamma_window.1)?;
        let lambdas = self.subgroup.unit_reps(self.p);
        let mut out = Vec::new();
        for n in self.n_range.0..=self.n_range.1 {
            for lambda in &lambdas {
                for gamma in &gammas {
                    out.push(Rep {
                        n,
                        lambda: lambda.clone(),
                        gamma: gamma.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, r: &Rep) -> bool {
        (self.n_range.0..=self.n_range.1).contains(&r.n) && r.gamma.in_ideal(self.gamma_window.0)
    }
}

/// `R(m, Lambda_m, Gamma)` restricted to a window.
pub fn special_reps(rs: &RepSystem) -> Result<Vec<GroupElement>> {
    Ok(rs.reps()?.iter().map(Rep::element).collect())
}
