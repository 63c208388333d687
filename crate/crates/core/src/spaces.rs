//! Weighted mixed norms `L_w^{s,t}` on the affine group, homogeneous Besov
//! norms and the coorbit norms that realize them.
//!
//! Exponents are `f64` with `f64::INFINITY` for the sup variants. Whenever
//! `s = t = 2` the squared norm is also returned exactly.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::affine::{GroupElement, SpecialSubgroup};
use crate::cwt::{sample_transform, Entry, SampledTransform, Sampling};
use crate::error::{Error, Result};
use crate::frames::{coefficients, FrameSpec};
use crate::padic::{abs_f64, q_pow};
use crate::scalars::ScaledScalar;
use crate::stepfn::{is_s0, StepFunction};

/// Normalization of the multiplicative Haar measure `dh/|h|` on `K^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    /// Every shell `{|h| = q^n}` has mass 1.
    #[default]
    ShellNormalized,
    /// `dh` is the additive Haar measure with `mu(D) = 1`; shells have mass `1 - 1/q`.
    Additive,
}

impl Convention {
    /// Mass of `lambda D_m^*` for a unit `lambda`.
    pub fn unit_coset_mass(self, p: u32, m: u32) -> BigRational {
        let shell = match self {
            Convention::ShellNormalized => BigRational::one(),
            Convention::Additive => BigRational::one() - q_pow(p, -1),
        };
        if m == 0 {
            shell
        } else {
            // [D^* : D_m^*] = (q - 1) q^{m-1}
            let index = BigRational::from_integer((p as i64 - 1).into()) * q_pow(p, m as i64 - 1);
            shell / index
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "shell-normalized" | "shell" => Ok(Convention::ShellNormalized),
            "additive" => Ok(Convention::Additive),
            _ => Err(Error::Parse(format!("unknown convention {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::ShellNormalized => "shell-normalized",
            Convention::Additive => "additive",
        }
    }
}

/// `w(x, h) = |h|^a (1 + |x|)^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub alpha_exp: BigRational,
    pub x_growth: BigRational,
}

impl Weight {
    pub fn new(alpha_exp: BigRational, x_growth: BigRational) -> Result<Self> {
        if x_growth < BigRational::zero() {
            return Err(Error::BadParam("x growth must be nonnegative".into()));
        }
        Ok(Weight { alpha_exp, x_growth })
    }

    pub fn one() -> Self {
        Self::dilation(BigRational::zero())
    }

    /// `|h|^a`.
    pub fn dilation(alpha_exp: BigRational) -> Self {
        Weight {
            alpha_exp,
            x_growth: BigRational::zero(),
        }
    }

    /// The coorbit weight `|h|^{-alpha - 1/2}`.
    pub fn besov(alpha: &BigRational) -> Self {
        Self::dilation(-alpha - BigRational::new(1.into(), 2.into()))
    }

    pub fn eval(&self, g: &GroupElement) -> f64 {
        let p = g.p() as f64;
        let a = self.alpha_exp.to_f64().unwrap_or(f64::NAN);
        let s = self.x_growth.to_f64().unwrap_or(f64::NAN);
        p.powf(-(g.dilation_exponent() as f64) * a) * (1.0 + abs_f64(g.x())).powf(s)
    }

    /// `|h|^a` at `v(h) = n`.
    pub fn at_scale(&self, p: u32, n: i64) -> f64 {
        (p as f64).powf(-(n as f64) * self.alpha_exp.to_f64().unwrap_or(f64::NAN))
    }

    /// `|h|^{2a}` at `v(h) = n` when it is a half-integer power of `q`.
    pub fn sq_at_scale_exact(&self, p: u32, n: i64) -> Option<ScaledScalar> {
        let e = BigRational::from_integer((-4 * n).into()) * &self.alpha_exp;
        if !e.is_integer() {
            return None;
        }
        Some(ScaledScalar::sqrt_q_pow(p, e.to_integer().to_i64()?))
    }

    fn require_dilation_only(&self) -> Result<()> {
        if self.x_growth.is_zero() {
            Ok(())
        } else {
            Err(Error::Unsupported("x-dependent weights in norm computations".into()))
        }
    }
}

/// Exponents, weight and measure convention of an `L_w^{s,t}` norm.
#[derive(Clone, Debug)]
pub struct MixedParams {
    pub s: f64,
    pub t: f64,
    pub weight: Weight,
    pub convention: Convention,
}

impl MixedParams {
    pub fn new(s: f64, t: f64, weight: Weight, convention: Convention) -> Result<Self> {
        for e in [s, t] {
            if e.is_nan() || e < 1.0 {
                return Err(Error::BadParam(format!("exponent {e} outside [1, inf]")));
            }
        }
        Ok(MixedParams {
            s,
            t,
            weight,
            convention,
        })
    }

    pub fn unweighted(s: f64, t: f64) -> Result<Self> {
        Self::new(s, t, Weight::one(), Convention::ShellNormalized)
    }

    fn is_l2(&self) -> bool {
        self.s == 2.0 && self.t == 2.0
    }
}

#[derive(Clone, Debug)]
pub struct NormReport {
    pub value: f64,
    /// The squared norm, exact, when `s = t = 2` and the weight allows it.
    pub exact_sq: Option<ScaledScalar>,
    /// Range of shells `k` (Besov) or dilation exponents `v(h)` (coorbit) that contribute.
    pub k_range: Option<(i64, i64)>,
}

impl NormReport {
    pub fn exact_sq_rational(&self) -> Option<BigRational> {
        self.exact_sq.as_ref().and_then(|v| v.to_rational())
    }
}

fn combine(terms: &[(f64, f64)], t: f64) -> f64 {
    // terms are (measure, inner) pairs
    if t.is_infinite() {
        terms.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    } else {
        terms.iter().map(|&(mu, v)| mu * v.powf(t)).sum::<f64>().powf(1.0 / t)
    }
}

/// `Phi_k = q^k 1_{P^k} - q^{k-1} 1_{P^{k-1}}`, whose Fourier transform is the
/// indicator of the shell `|xi| = q^k`.
pub fn phi_k(p: u32, k: i64) -> StepFunction {
    StepFunction::ideal_indicator(p, k)
        .scale_rational(&q_pow(p, k))
        .sub(&StepFunction::ideal_indicator(p, k - 1).scale_rational(&q_pow(p, k - 1)))
}

/// The radial wavelet `1_D - q^{-1} 1_{P^{-1}}`.
pub fn besov_wavelet(p: u32) -> StepFunction {
    phi_k(p, 0)
}

/// Shells `|xi| = q^k` met by the Fourier support of a mean-zero `f`.
pub fn shell_range(f: &StepFunction) -> Result<Option<(i64, i64)>> {
    if f.is_zero() {
        return Ok(None);
    }
    if !is_s0(f) {
        return Err(Error::NotS0);
    }
    let (l, k) = f.membership_class()?;
    Ok(Some((l + 1, k)))
}

/// `(sum_k q^{k alpha t} ||f * Phi_k||_s^t)^{1/t}`.
pub fn besov_norm(f: &StepFunction, alpha: &BigRational, s: f64, t: f64) -> Result<NormReport> {
    MixedParams::unweighted(s, t)?;
    let p = f.p();
    let Some((lo, hi)) = shell_range(f)? else {
        return Ok(NormReport {
            value: 0.0,
            exact_sq: Some(ScaledScalar::zero(p)),
            k_range: None,
        });
    };
    let a = alpha.to_f64().unwrap_or(f64::NAN);
    let mut terms = Vec::new();
    let mut exact = (s == 2.0 && t == 2.0).then(|| ScaledScalar::zero(p));
    for k in lo..=hi {
        let piece = f.convolve(&phi_k(p, k));
        if piece.is_zero() {
            continue;
        }
        terms.push((1.0, (p as f64).powf(k as f64 * a) * piece.lp_norm(s)));
        if let Some(acc) = exact.take() {
            let e = BigRational::from_integer((4 * k).into()) * alpha;
            exact = e
                .to_integer()
                .to_i64()
                .filter(|_| e.is_integer())
                .map(|e| acc.add(&piece.norm_sq().mul(&ScaledScalar::sqrt_q_pow(p, e))));
        }
    }
    Ok(NormReport {
        value: combine(&terms, t),
        exact_sq: exact,
        k_range: Some((lo, hi)),
    })
}

fn slice_terms<'a>(st: &'a SampledTransform, j: usize) -> impl Iterator<Item = (i64, &'a StepFunction)> + 'a {
    st.slices()
        .filter(move |(key, _)| key.j == j)
        .map(|(key, s)| (key.n, s))
}

fn wavelet_norm(st: &SampledTransform, j: usize, prm: &MixedParams, outer: f64) -> (f64, Option<ScaledScalar>) {
    let p = st.p();
    let mass = prm.convention.unit_coset_mass(p, st.subgroup().m);
    let mass_f = mass.to_f64().unwrap_or(f64::NAN);
    let mut terms = Vec::new();
    let mut exact = prm.is_l2().then(|| ScaledScalar::zero(p));
    for (n, slice) in slice_terms(st, j) {
        terms.push((mass_f, prm.weight.at_scale(p, n) * slice.lp_norm(prm.s)));
        if let Some(acc) = exact.take() {
            exact = prm
                .weight
                .sq_at_scale_exact(p, n)
                .map(|w| acc.add(&slice.norm_sq().mul(&w).scale(&mass)));
        }
    }
    let value = if prm.t.is_infinite() {
        combine(&terms, prm.t)
    } else {
        combine(&terms, prm.t).powf(prm.t / outer)
    };
    (value, exact)
}

fn mixed_with_outer(st: &SampledTransform, prm: &MixedParams, outer: f64) -> Result<NormReport> {
    prm.weight.require_dilation_only()?;
    let p = st.p();
    let mut sq = 0.0;
    let mut exact = Some(ScaledScalar::zero(p));
    let mut single = None;
    for j in 0..st.wavelet_count() {
        let (v, e) = wavelet_norm(st, j, prm, outer);
        sq += v * v;
        single = Some(v);
        exact = exact.zip(e).map(|(a, b)| a.add(&b));
    }
    let value = if st.wavelet_count() == 1 {
        single.unwrap_or(0.0)
    } else {
        sq.sqrt()
    };
    let ns: Vec<i64> = st.slices().map(|(k, _)| k.n).collect();
    Ok(NormReport {
        value,
        exact_sq: if prm.is_l2() { exact } else { None },
        k_range: ns.iter().min().copied().zip(ns.iter().max().copied()),
    })
}

/// `||F||_{L_w^{s,t}}` of a sampled transform, computed on its representatives
/// as `(sum_{n, lambda} mu(lambda D_m^*) w(q^{-n})^t ||F(., p^n lambda)||_s^t)^{1/t}`.
/// Several wavelets are combined in `l^2`.
pub fn mixed_norm(st: &SampledTransform, prm: &MixedParams) -> Result<NormReport> {
    mixed_with_outer(st, prm, prm.t)
}

/// The same sum read with outer root `1/s` in place of `1/t`.
pub fn mixed_norm_outer_s(st: &SampledTransform, prm: &MixedParams) -> Result<NormReport> {
    let mut r = mixed_with_outer(st, prm, prm.s)?;
    r.exact_sq = None;
    Ok(r)
}

/// `||W_phi f||_{L_w^{s,t}}` with `phi = 1_D - q^{-1} 1_{P^{-1}}` and
/// `w = |h|^{-alpha - 1/2}`.
pub fn coorbit_norm(
    f: &StepFunction,
    alpha: &BigRational,
    s: f64,
    t: f64,
    convention: Convention,
) -> Result<NormReport> {
    if !is_s0(f) {
        return Err(Error::NotS0);
    }
    let prm = MixedParams::new(s, t, Weight::besov(alpha), convention)?;
    let p = f.p();
    if f.is_zero() {
        return Ok(NormReport {
            value: 0.0,
            exact_sq: Some(ScaledScalar::zero(p)),
            k_range: None,
        });
    }
    let phi = besov_wavelet(p);
    let st = sample_transform(f, &[phi], &Sampling::Auto(SpecialSubgroup::new(0, 0)))?;
    mixed_norm(&st, &prm)
}

/// `||alpha||_{Y_d}`: the mixed norm of `sum_r alpha_r 1_{rH}`, combined over
/// wavelets in `l^2`.
pub fn coefficient_space_norm(fs: &FrameSpec, entries: Vec<Entry>, prm: &MixedParams) -> Result<NormReport> {
    mixed_norm(&coefficients(fs, entries)?, prm)
}

/// Control weight for `L_w^{s,t}` at `(x, h)` with base weight `w(h) = |h|^a`
/// and `v_1(x,h) = (1 + |x| + |h^{-1} x| + |h^{-1}| + |h|)^r`, `r` the weight's
/// x-growth.
pub fn control_weight_eval(s: f64, t: f64, w: &Weight, g: &GroupElement) -> f64 {
    let p = g.p() as f64;
    let hv = g.dilation_exponent() as f64;
    let habs = p.powf(-hv);
    let xabs = abs_f64(g.x());
    let r = w.x_growth.to_f64().unwrap_or(f64::NAN);
    let v1 = (1.0 + xabs + xabs / habs + 1.0 / habs + habs).powf(r);
    let inv_t = if t.is_infinite() { 0.0 } else { 1.0 / t };
    let inv_s = if s.is_infinite() { 0.0 } else { 1.0 / s };
    // Delta_G(0,h) = |h|^{-1}
    let delta = 1.0 / habs;
    let m = delta.powf(-inv_t).max(delta.powf(inv_t - 1.0));
    let a = w.alpha_exp.to_f64().unwrap_or(f64::NAN);
    let ws = habs.powf(a) + habs.powf(-a);
    let c = habs.powf(inv_s - inv_t) + habs.powf(inv_t - inv_s);
    v1 * m * ws * c
}
