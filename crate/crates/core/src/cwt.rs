//! Continuous wavelet transform `W_g f(x,h) = <f, pi(x,h) g>`.
//!
//! For fixed `h` the transform is the convolution `f * G_h` with
//! `G_h(t) = conj(pi(0,h) g (-t))`, so every slice `x -> W_g f(x,h)` is again an
//! exact step function. A [`SampledTransform`] stores one such slice per
//! dilation coset `p^n lambda` and wavelet index, sampled at the points
//! `p^n lambda gamma` of a special system of representatives.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::affine::{fixed_subgroup, GroupElement, Rep, RepSystem, SpecialSubgroup};
use crate::error::{Error, Result};
use crate::fourier::fourier;
use crate::padic::{coset_reps, q_pow, PAdicNumber};
use crate::scalars::{Scalar, ScaledScalar};
use crate::stepfn::StepFunction;

/// `C_g = int |g^(xi)|^2 / |xi| d xi`, exact.
pub fn admissibility(g: &StepFunction) -> Result<BigRational> {
    admissibility_exact(g)?
        .to_rational()
        .ok_or_else(|| Error::Unsupported("admissibility constant is not rational".into()))
}

/// `C_g` in the coefficient field; rational whenever `g` takes rational values.
pub fn admissibility_exact(g: &StepFunction) -> Result<ScaledScalar> {
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let ghat = fourier(g)?;
    let p = g.p();
    if !ghat.evaluate(&PAdicNumber::zero(p)).is_zero() {
        return Err(Error::Divergent);
    }
    let r = ghat.resolution();
    let mut total = ScaledScalar::zero(p);
    for (c, v) in ghat.terms() {
        let vc = c.valuation().expect("the ball at the origin carries no mass");
        total = total.add(&v.abs_sq().scale(&q_pow(p, vc - r)));
    }
    Ok(total)
}

/// `<f, pi(u) g>`, evaluated directly.
pub fn transform_point<S: Scalar>(f: &StepFunction<S>, g: &StepFunction<S>, u: &GroupElement) -> Result<S> {
    Ok(f.inner_product(&u.act(g)?))
}

/// The slice `x -> W_g f(x, h)` as an exact step function.
pub fn transform_slice(f: &StepFunction, g: &StepFunction, h: &PAdicNumber) -> Result<StepFunction> {
    let p = f.p();
    let gh = g.pi_apply(&PAdicNumber::zero(p), h)?.reflect().conj();
    Ok(f.convolve(&gh))
}

/// Certified support region of `W_g f` for `f` in class `(l', k')` and `g` in
/// class `(l, k)`, both of mean zero: `v(h)` in `[l' - k, k' - l]`, and for
/// such `h` the slice lives in `P^{min(l', l + v(h))}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportBounds {
    pub f_class: (i64, i64),
    pub g_class: (i64, i64),
    /// Certified range of `v(h)`.
    pub n_range: (i64, i64),
}

impl SupportBounds {
    /// Exponent `s` with the slice at `v(h) = n` supported in `P^s`.
    pub fn x_scale(&self, n: i64) -> i64 {
        self.f_class.0.min(self.g_class.0 + n)
    }

    /// The range where the Fourier supports actually overlap (may be empty).
    pub fn tight_n_range(&self) -> (i64, i64) {
        (self.n_range.0 + 1, self.n_range.1 - 1)
    }

    /// `|h|`-annulus `[q^{l-k'}, q^{k-l'}]` of the certified region.
    pub fn h_annulus(&self, p: u32) -> (BigRational, BigRational) {
        (q_pow(p, -self.n_range.1), q_pow(p, -self.n_range.0))
    }
}

pub fn support_bounds(f: &StepFunction, g: &StepFunction) -> Result<SupportBounds> {
    for h in [f, g] {
        if h.is_zero() {
            return Err(Error::ZeroFunction);
        }
        if !h.integral().is_zero() {
            return Err(Error::NotS0);
        }
    }
    let fc = f.membership_class()?;
    let gc = g.membership_class()?;
    Ok(SupportBounds {
        f_class: fc,
        g_class: gc,
        n_range: (fc.0 - gc.1, fc.1 - gc.0),
    })
}

/// Key of one slice: dilation `p^n lambda` and wavelet index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SliceKey {
    pub n: i64,
    pub lambda: PAdicNumber,
    pub j: usize,
}

impl SliceKey {
    pub fn dilation(&self) -> PAdicNumber {
        self.lambda.mul_pow_p(self.n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub rep: Rep,
    pub j: usize,
    pub value: ScaledScalar,
}

/// A transform restricted to representatives, stored slice by slice.
///
/// The slice for key `(n, lambda, j)` is a step function constant on cosets of
/// `P^{k+n}` whose value on the coset of `p^n lambda gamma` is
/// `W_{g_j} f(p^n lambda gamma, p^n lambda)`.
#[derive(Clone, Debug)]
pub struct SampledTransform {
    p: u32,
    subgroup: SpecialSubgroup,
    wavelet_count: usize,
    window: RepSystem,
    slices: BTreeMap<SliceKey, StepFunction>,
}

/// How `sample_transform` chooses its enumeration window.
#[derive(Clone, Debug)]
pub enum Sampling {
    /// Window computed from the support bounds, with a guard ring.
    Auto(SpecialSubgroup),
    /// A user-supplied window; nonzero values on its boundary are an error.
    Window(RepSystem),
}

impl SampledTransform {
    pub fn empty(p: u32, window: RepSystem, wavelet_count: usize) -> Self {
        SampledTransform {
            p,
            subgroup: window.subgroup,
            wavelet_count,
            window,
            slices: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn subgroup(&self) -> SpecialSubgroup {
        self.subgroup
    }

    pub fn wavelet_count(&self) -> usize {
        self.wavelet_count
    }

    pub fn window(&self) -> &RepSystem {
        &self.window
    }

    pub fn slices(&self) -> impl Iterator<Item = (&SliceKey, &StepFunction)> {
        self.slices.iter()
    }

    fn coset_scale(&self, n: i64) -> i64 {
        self.subgroup.k + n
    }

    fn insert_slice(&mut self, key: SliceKey, slice: StepFunction) {
        if slice.is_zero() {
            self.slices.remove(&key);
        } else {
            self.slices.insert(key, slice);
        }
    }

    /// Build from explicit entries; repeated keys are summed.
    pub fn from_entries(
        p: u32,
        window: RepSystem,
        wavelet_count: usize,
        entries: impl IntoIterator<Item = Entry>,
    ) -> Result<Self> {
        let mut out = Self::empty(p, window, wavelet_count);
        let mut grouped: BTreeMap<SliceKey, Vec<(PAdicNumber, ScaledScalar)>> = BTreeMap::new();
        for e in entries {
            if e.j >= wavelet_count {
                return Err(Error::BadParam(format!(
                    "wavelet index {} out of range (count {wavelet_count})",
                    e.j + 1
                )));
            }
            let key = SliceKey {
                n: e.rep.n,
                lambda: e.rep.lambda.clone(),
                j: e.j,
            };
            grouped
                .entry(key)
                .or_default()
                .push((e.rep.element().x().clone(), e.value));
        }
        for (key, vals) in grouped {
            let scale = out.coset_scale(key.n);
            out.insert_slice(key, StepFunction::from_values(p, scale, vals));
        }
        Ok(out)
    }

    /// All nonzero entries, sorted by representative `(n, lambda, gamma)` and
    /// then wavelet index.
    pub fn entries(&self) -> Result<Vec<Entry>> {
        let mut out = Vec::new();
        for (key, slice) in &self.slices {
            let scale = self.coset_scale(key.n);
            let h = key.dilation();
            for (c, v) in slice.terms() {
                for t in coset_reps(self.p, slice.resolution(), scale)? {
                    let x = &(c + &t);
                    let g = GroupElement::new(x.clone(), h.clone())?;
                    out.push(Entry {
                        rep: Rep::locate(&g, &self.subgroup),
                        j: key.j,
                        value: v.clone(),
                    });
                }
            }
        }
        out.sort_by(|a, b| a.rep.cmp(&b.rep).then(a.j.cmp(&b.j)));
        Ok(out)
    }

    pub fn get(&self, rep: &Rep, j: usize) -> ScaledScalar {
        let key = SliceKey {
            n: rep.n,
            lambda: rep.lambda.clone(),
            j,
        };
        match self.slices.get(&key) {
            Some(s) => s.evaluate(rep.element().x()),
            None => ScaledScalar::zero(self.p),
        }
    }

    /// Number of nonzero entries.
    pub fn num_entries(&self) -> u64 {
        self.slices
            .iter()
            .map(|(key, s)| {
                let w = (self.coset_scale(key.n) - s.resolution()) as u32;
                s.len() as u64 * (self.p as u64).pow(w)
            })
            .sum()
    }

    /// `sum_{r,j} |F(r,j)|^2`, exact.
    pub fn abs_sq_sum(&self) -> ScaledScalar {
        self.slices.iter().fold(ScaledScalar::zero(self.p), |acc, (key, s)| {
            acc.add(&s.norm_sq().scale(&q_pow(self.p, self.coset_scale(key.n))))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    fn zip(&self, other: &Self, sign: bool) -> Self {
        let mut out = self.clone();
        for (key, s) in &other.slices {
            let merged = match out.slices.get(key) {
                Some(a) if sign => a.add(s),
                Some(a) => a.sub(s),
                None if sign => s.clone(),
                None => s.neg(),
            };
            out.insert_slice(key.clone(), merged);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, false)
    }

    pub fn scale(&self, c: &ScaledScalar) -> Self {
        let mut out = Self::empty(self.p, self.window.clone(), self.wavelet_count);
        for (key, s) in &self.slices {
            out.insert_slice(key.clone(), s.scale(c));
        }
        out
    }

    /// Restrict to keys accepted by `keep`.
    pub fn filter_entries(&self, keep: impl Fn(&Rep, usize) -> bool) -> Result<Self> {
        let kept: Vec<Entry> = self.entries()?.into_iter().filter(|e| keep(&e.rep, e.j)).collect();
        Self::from_entries(self.p, self.window.clone(), self.wavelet_count, kept)
    }

    /// Whether every nonzero entry lies in `window`.
    pub fn within(&self, window: &RepSystem) -> bool {
        self.slices.iter().all(|(key, s)| {
            (window.n_range.0..=window.n_range.1).contains(&key.n)
                && s.support_exponent().is_none_or(|e| e >= key.n + window.gamma_window.0)
        })
    }
}

impl PartialEq for SampledTransform {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.subgroup == other.subgroup && self.sub(other).is_zero()
    }
}

/// Sample the slice `w` (exact `x -> W(x, p^n lambda)`) at the representatives.
fn sample_slice(w: &StepFunction, h: &PAdicNumber, sub: &SpecialSubgroup, n: i64) -> Result<StepFunction> {
    let scale = sub.k + n;
    let w = w.coarsen();
    if w.resolution() <= scale {
        return Ok(w);
    }
    let mut vals = Vec::new();
    for (c, v) in w.terms() {
        let rep = Rep::locate(&GroupElement::new(c.clone(), h.clone())?, sub);
        let x = rep.element().x().clone();
        if x.canonical_rep(w.resolution()) == *c {
            vals.push((x, v.clone()));
        }
    }
    Ok(StepFunction::from_values(w.p(), scale, vals))
}

/// Sample `W_{g_j} f` on a representative system of the chosen subgroup.
pub fn sample_transform(f: &StepFunction, wavelets: &[StepFunction], sampling: &Sampling) -> Result<SampledTransform> {
    let p = f.p();
    if wavelets.is_empty() {
        return Err(Error::BadParam("no wavelets".into()));
    }
    let bounds: Vec<SupportBounds> = wavelets.iter().map(|g| support_bounds(f, g)).collect::<Result<_>>()?;
    let sub = match sampling {
        Sampling::Auto(s) => *s,
        Sampling::Window(rs) => rs.subgroup,
    };
    let lambdas = sub.unit_reps(p);
    let n_lo = bounds.iter().map(|b| b.n_range.0).min().unwrap();
    let n_hi = bounds.iter().map(|b| b.n_range.1).max().unwrap();
    let window = match sampling {
        Sampling::Window(rs) => rs.clone(),
        Sampling::Auto(_) => {
            let g_lo = bounds
                .iter()
                .flat_map(|b| (b.n_range.0..=b.n_range.1).map(move |n| b.x_scale(n) - n))
                .min()
                .unwrap()
                .min(sub.k);
            RepSystem::new(p, sub, (n_lo, n_hi), (g_lo, sub.k))?
        }
    };
    // guard ring in n around both the window and the certified range
    let scan_lo = window.n_range.0.min(n_lo) - 1;
    let scan_hi = window.n_range.1.max(n_hi) + 1;
    let mut out = SampledTransform::empty(p, window.clone(), wavelets.len());
    for (j, (g, b)) in wavelets.iter().zip(&bounds).enumerate() {
        for n in scan_lo..=scan_hi {
            let in_window = (window.n_range.0..=window.n_range.1).contains(&n);
            let certified_zero = n < b.n_range.0 || n > b.n_range.1;
            if !in_window && certified_zero && n != scan_lo && n != scan_hi {
                continue;
            }
            for lambda in &lambdas {
                let h = lambda.mul_pow_p(n);
                let w = transform_slice(f, g, &h)?;
                if w.is_zero() {
                    continue;
                }
                let slice = sample_slice(&w, &h, &sub, n)?;
                if slice.is_zero() {
                    continue;
                }
                let key = SliceKey {
                    n,
                    lambda: lambda.clone(),
                    j,
                };
                if !in_window {
                    return Err(Error::WindowTooSmall(format!("v(h) = {n}, wavelet {}", j + 1)));
                }
                let e = slice.support_exponent().expect("nonzero slice");
                if e < n + window.gamma_window.0 {
                    return Err(Error::WindowTooSmall(format!(
                        "v(h) = {n}, wavelet {}: translation outside P^{}",
                        j + 1,
                        n + window.gamma_window.0
                    )));
                }
                out.insert_slice(key, slice);
            }
        }
    }
    Ok(out)
}

/// Sample on the fixed subgroup of `g` with an automatic window.
pub fn sample_auto(f: &StepFunction, g: &StepFunction) -> Result<SampledTransform> {
    sample_transform(f, std::slice::from_ref(g), &Sampling::Auto(fixed_subgroup(g)?))
}

/// `(mu_G(H_g) sum_r |W_g f(r)|^2, C_g ||f||^2)` with `H_g` the fixed group of `g`.
pub fn isometry_check(f: &StepFunction, g: &StepFunction) -> Result<(ScaledScalar, ScaledScalar)> {
    let cg = admissibility_exact(g)?;
    let st = sample_auto(f, g)?;
    let lhs = st.abs_sq_sum().scale(&st.subgroup().measure(f.p()));
    let rhs = f.norm_sq().mul(&cg);
    Ok((lhs, rhs))
}

/// The corollary wavelet `chi(p^{-k} x) 1_D`, the inverse transform of
/// `1_{p^{-k} + D}`.
pub fn corollary_wavelet(p: u32, k: i64) -> Result<StepFunction> {
    if k < 1 {
        return Err(Error::BadParam(format!("corollary wavelet needs k >= 1, got {k}")));
    }
    let values = coset_reps(p, 0, k)?.into_iter().map(|x| {
        let phase = x.mul_pow_p(-k).char_phase();
        let v = ScaledScalar::root_of_unity(p, &phase).expect("p-power phase");
        (x, v)
    });
    Ok(StepFunction::from_values(p, k, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::inverse_fourier;
    use crate::stepfn::basic_wavelet;

    fn n(p: u32, num: i64, e: u32) -> PAdicNumber {
        PAdicNumber::new(p, num, e)
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn admissibility_examples() {
        for p in [2u32, 3, 5] {
            for k in 1..3 {
                let g = corollary_wavelet(p, k).unwrap();
                assert_eq!(admissibility(&g), Ok(q_pow(p, -k)));
            }
            assert_eq!(admissibility(&basic_wavelet(p)), Ok(r(p as i64 - 1, p as i64)));
            assert_eq!(
                admissibility(&StepFunction::ideal_indicator(p, 0)),
                Err(Error::Divergent)
            );
        }
    }

    #[test]
    fn corollary_wavelet_is_inverse_transform() {
        let p = 3;
        let k = 2;
        let ind = StepFunction::ball(p, &PAdicNumber::prime_power(p, -k), 0, ScaledScalar::one(p));
        assert_eq!(inverse_fourier(&ind).unwrap(), corollary_wavelet(p, k).unwrap());
        assert_eq!(corollary_wavelet(p, k).unwrap().membership_class(), Ok((0, k)));
    }

    #[test]
    fn worked_example_p2() {
        let g = corollary_wavelet(2, 1).unwrap();
        let st = sample_auto(&g, &g).unwrap();
        let entries = st.entries().unwrap();
        let got: Vec<_> = entries
            .iter()
            .map(|e| (e.rep.element(), e.value.to_rational().unwrap()))
            .collect();
        let one = PAdicNumber::one(2);
        assert_eq!(
            got,
            vec![
                (GroupElement::new(n(2, 0, 0), one.clone()).unwrap(), r(1, 1)),
                (GroupElement::new(n(2, 1, 0), one.clone()).unwrap(), r(-1, 1)),
            ]
        );
        let (lhs, rhs) = isometry_check(&g, &g).unwrap();
        assert_eq!(lhs.to_rational(), Some(r(1, 2)));
        assert_eq!(rhs.to_rational(), Some(r(1, 2)));
        let u = GroupElement::new(n(2, 1, 0), one).unwrap();
        assert_eq!(transform_point(&g, &g, &u).unwrap(), ScaledScalar::from_int(2, -1));
    }

    #[test]
    fn slices_match_direct_evaluation() {
        let p = 3;
        let g = basic_wavelet(p);
        let f = corollary_wavelet(p, 2)
            .unwrap()
            .pi_apply(&n(p, 1, 1), &n(p, 2, 0))
            .unwrap();
        let st = sample_auto(&f, &g).unwrap();
        for e in st.entries().unwrap() {
            let direct = transform_point(&f, &g, &e.rep.element()).unwrap();
            assert_eq!(direct, e.value);
        }
        assert!(st.num_entries() > 0);
        let (lhs, rhs) = isometry_check(&f, &g).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn support_bound_example() {
        let g = corollary_wavelet(2, 1).unwrap();
        let b = support_bounds(&g, &g).unwrap();
        assert_eq!(b.n_range, (-1, 1));
        assert_eq!(b.tight_n_range(), (0, 0));
        assert_eq!(b.x_scale(0), 0);
        assert_eq!(
            support_bounds(&StepFunction::ideal_indicator(2, 0), &g),
            Err(Error::NotS0)
        );
    }

    #[test]
    fn small_window_is_reported() {
        let g = corollary_wavelet(2, 2).unwrap();
        let f = basic_wavelet(2);
        let sub = fixed_subgroup(&g).unwrap();
        let rs = RepSystem::new(2, sub, (0, 0), (0, sub.k)).unwrap();
        assert!(matches!(
            sample_transform(&f, &[g], &Sampling::Window(rs)),
            Err(Error::WindowTooSmall(_))
        ));
    }
}
