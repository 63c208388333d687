//! Tight wavelet frames indexed by representatives of a special subgroup:
//! construction, exact verification, analysis, synthesis, reconstruction and
//! the reproducing-kernel operator.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::affine::{fixed_subgroup, Rep, RepSystem, SpecialSubgroup};
use crate::cwt::{admissibility, corollary_wavelet, sample_transform, Entry, SampledTransform, Sampling};
use crate::error::{Error, Result};
use crate::fourier::inverse_fourier;
use crate::padic::{check_prime, q_pow, PAdicNumber};
use crate::scalars::ScaledScalar;
use crate::stepfn::StepFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct FrameSpec {
    pub p: u32,
    pub wavelets: Vec<StepFunction>,
    pub subgroup: SpecialSubgroup,
    /// Frame constant, once verified.
    pub constant: Option<BigRational>,
}

/// Constants predicted for a frame spec alongside the measured one.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    /// `sum_j C_{g_j}`.
    pub admissibility: BigRational,
    /// `mu_G(H)`.
    pub measure: BigRational,
    /// `sum_j C_{g_j} / mu_G(H)`.
    pub ratio: BigRational,
    /// `sum_j C_{g_j} / sqrt(mu_G(H))`.
    pub sqrt_normalized: f64,
}

impl FrameSpec {
    pub fn new(p: u32, wavelets: Vec<StepFunction>, subgroup: SpecialSubgroup) -> Result<Self> {
        check_prime(p)?;
        if wavelets.is_empty() {
            return Err(Error::BadParam("a frame needs at least one wavelet".into()));
        }
        for g in &wavelets {
            if g.p() != p {
                return Err(Error::PrimeMismatch(g.p(), p));
            }
            if g.is_zero() {
                return Err(Error::ZeroFunction);
            }
            if !g.integral().is_zero() {
                return Err(Error::NotS0);
            }
        }
        Ok(FrameSpec {
            p,
            wavelets,
            subgroup,
            constant: None,
        })
    }

    pub fn predicted(&self) -> Result<Prediction> {
        let mut cg = BigRational::zero();
        for g in &self.wavelets {
            cg += admissibility(g)?;
        }
        let measure = self.subgroup.measure(self.p);
        let ratio = &cg / &measure;
        let sqrt_normalized = cg.to_f64().unwrap_or(f64::NAN) / measure.to_f64().unwrap_or(f64::NAN).sqrt();
        Ok(Prediction {
            admissibility: cg,
            measure,
            ratio,
            sqrt_normalized,
        })
    }

    /// Whether `H` fixes wavelet `j`, so that coefficients are right-invariant.
    pub fn fixes(&self, j: usize) -> Result<bool> {
        let fix = fixed_subgroup(&self.wavelets[j])?;
        let dil = fix.m == 0 || (self.subgroup.m != 0 && self.subgroup.m >= fix.m);
        Ok(self.subgroup.k >= fix.k && dil)
    }

    fn verified_constant(&self) -> Result<&BigRational> {
        self.constant
            .as_ref()
            .ok_or_else(|| Error::BadParam("frame constant not verified yet".into()))
    }
}

/// The frame generated by one mean-zero wavelet over its fixed subgroup.
pub fn build_frame(g: &StepFunction) -> Result<FrameSpec> {
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if !g.integral().is_zero() {
        return Err(Error::NotS0);
    }
    FrameSpec::new(g.p(), vec![g.clone()], fixed_subgroup(g)?)
}

/// The corollary wavelet `chi(p^{-k} x) 1_D` over `P^k x D_k^*`.
pub fn corollary_frame(p: u32, k: i64) -> Result<FrameSpec> {
    check_prime(p)?;
    let g = corollary_wavelet(p, k)?;
    FrameSpec::new(p, vec![g], SpecialSubgroup::new(k, k as u32))
}

/// The `q - 1` wavelets with `g_i^ = 1_{i/p + D}` over `D x D^*`.
pub fn benedetto_onb(p: u32) -> Result<FrameSpec> {
    check_prime(p)?;
    let wavelets = (1..p as i64)
        .map(|i| {
            let sigma = PAdicNumber::new(p, i, 1);
            inverse_fourier(&StepFunction::ball(p, &sigma, 0, ScaledScalar::one(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSpec::new(p, wavelets, SpecialSubgroup::new(0, 0))
}

/// All nonzero coefficients `<f, pi(r) g_j>`, certified complete.
pub fn analyze_coeffs(f: &StepFunction, fs: &FrameSpec) -> Result<SampledTransform> {
    if f.is_zero() {
        return Ok(SampledTransform::empty(
            fs.p,
            RepSystem::new(fs.p, fs.subgroup, (0, 0), (fs.subgroup.k, fs.subgroup.k))?,
            fs.wavelets.len(),
        ));
    }
    sample_transform(f, &fs.wavelets, &Sampling::Auto(fs.subgroup))
}

/// `sum_{r,j} |<f, pi(r) g_j>|^2`.
pub fn frame_sum(f: &StepFunction, fs: &FrameSpec) -> Result<ScaledScalar> {
    Ok(analyze_coeffs(f, fs)?.abs_sq_sum())
}

/// Per-function ratios `frame_sum(f) / ||f||^2`; `None` when the ratio is
/// not rational.
pub fn frame_ratios(fs: &FrameSpec, tests: &[StepFunction]) -> Result<Vec<Option<BigRational>>> {
    tests
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| Ok(frame_sum(f, fs)?.ratio_to(&f.norm_sq())))
        .collect()
}

/// The common ratio over the test family, or `NotTight` with the table.
pub fn frame_constant(fs: &FrameSpec, tests: &[StepFunction]) -> Result<BigRational> {
    let ratios = frame_ratios(fs, tests)?;
    let Some(first) = ratios.first().cloned() else {
        return Err(Error::BadParam("empty test family".into()));
    };
    match first {
        Some(c) if ratios.iter().all(|r| r.as_ref() == Some(&c)) => Ok(c),
        _ => Err(Error::NotTight(
            ratios
                .iter()
                .map(|r| r.as_ref().map_or("irrational".to_string(), |r| r.to_string()))
                .collect(),
        )),
    }
}

/// Verify tightness on `tests` and record the constant.
pub fn verify(fs: &FrameSpec, tests: &[StepFunction]) -> Result<FrameSpec> {
    let c = frame_constant(fs, tests)?;
    let mut out = fs.clone();
    out.constant = Some(c);
    Ok(out)
}

/// Default verification family: the wavelets, some of their translates and
/// dilates, and seeded random mean-zero functions.
pub fn test_family(fs: &FrameSpec, seed: u64, count: usize) -> Result<Vec<StepFunction>> {
    use crate::generators::{Generator, Shape};
    let p = fs.p;
    let mut out = fs.wavelets.clone();
    let one = PAdicNumber::one(p);
    for g in &fs.wavelets {
        out.push(g.pi_apply(&PAdicNumber::new(p, 1, 1), &one)?);
        out.push(g.pi_apply(&PAdicNumber::zero(p), &PAdicNumber::prime_power(p, 1))?);
    }
    let mut gen = Generator::new(p, seed);
    let mut shape = Shape::desk(p);
    shape.bound = 2;
    for _ in 0..count {
        out.push(gen.random_s0(shape));
    }
    Ok(out)
}

/// `sum_{(r,j)} alpha(r,j) pi(r) g_j`.
pub fn synthesize(alpha: &SampledTransform, fs: &FrameSpec) -> Result<StepFunction> {
    let p = fs.p;
    let mut total = StepFunction::zero(p, 0);
    let fixes: Vec<bool> = (0..fs.wavelets.len()).map(|j| fs.fixes(j)).collect::<Result<_>>()?;
    let zero = PAdicNumber::zero(p);
    for (key, slice) in alpha.slices() {
        if key.j >= fs.wavelets.len() {
            return Err(Error::BadParam(format!("wavelet index {} out of range", key.j + 1)));
        }
        let g = &fs.wavelets[key.j];
        let h = key.dilation();
        let part = if fixes[key.j] {
            // atoms only depend on the coset, so the sum is a convolution
            let atom = g.pi_apply(&zero, &h)?;
            slice.convolve(&atom).scale_rational(&q_pow(p, fs.subgroup.k + key.n))
        } else {
            let mut acc = StepFunction::zero(p, 0);
            let scale = fs.subgroup.k + key.n;
            let fine = slice.refine(scale)?;
            for (c, v) in fine.terms() {
                let rep = Rep::locate(&crate::affine::GroupElement::new(c.clone(), h.clone())?, &fs.subgroup);
                let el = rep.element();
                acc = acc.add(&el.act(g)?.scale(v));
            }
            acc
        };
        total = total.add(&part);
    }
    Ok(total.coarsen())
}

/// `(1/C) sum alpha(r,j) pi(r) g_j` with the verified constant.
pub fn reconstruct(coeffs: &SampledTransform, fs: &FrameSpec) -> Result<StepFunction> {
    let c = fs.verified_constant()?.clone();
    let f = synthesize(coeffs, fs)?;
    let pure_inputs = fs
        .wavelets
        .iter()
        .all(|g| g.terms().all(|(_, v)| v.is_pure_cyclotomic()));
    if pure_inputs && parity_consistent(coeffs) && f.terms().any(|(_, v)| !v.is_pure_cyclotomic()) {
        return Err(Error::Internal("sqrt(q) parity violated in reconstruction".into()));
    }
    Ok(f.scale_rational(&(BigRational::from_integer(1.into()) / c)))
}

/// Coefficients carry `sqrt(q)` exactly on the odd dilation levels.
fn parity_consistent(coeffs: &SampledTransform) -> bool {
    coeffs.slices().all(|(key, s)| {
        s.terms().all(|(_, v)| {
            if key.n.rem_euclid(2) == 0 {
                v.is_pure_cyclotomic()
            } else {
                v.a().is_zero()
            }
        })
    })
}

/// Gram entries `t_{A,B} = <pi(s) g_k, pi(r) g_j>` for `A = (r,j)`, `B = (s,k)`.
pub fn kernel_matrix(fs: &FrameSpec, index: &[(Rep, usize)]) -> Result<Vec<Vec<ScaledScalar>>> {
    let atoms: Vec<StepFunction> = index
        .iter()
        .map(|(r, j)| r.element().act(&fs.wavelets[*j]))
        .collect::<Result<_>>()?;
    Ok((0..index.len())
        .map(|a| (0..index.len()).map(|b| atoms[b].inner_product(&atoms[a])).collect())
        .collect())
}

/// The full index set `R x {1..m}` of a window.
pub fn window_index(fs: &FrameSpec, window: &RepSystem) -> Result<Vec<(Rep, usize)>> {
    let reps = window.reps()?;
    Ok(reps
        .into_iter()
        .flat_map(|r| (0..fs.wavelets.len()).map(move |j| (r.clone(), j)))
        .collect())
}

/// `T alpha`, through synthesis and analysis.
pub fn kernel_apply(alpha: &SampledTransform, fs: &FrameSpec) -> Result<SampledTransform> {
    let f = synthesize(alpha, fs)?;
    analyze_coeffs(&f, fs)
}

fn support(st: &SampledTransform) -> Result<BTreeSet<(Rep, usize)>> {
    Ok(st.entries()?.into_iter().map(|e| (e.rep, e.j)).collect())
}

/// Outcome of an idempotency check.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelCheck {
    pub idempotent: bool,
    /// Size of the index set the matrix was formed on.
    pub index_size: usize,
}

/// Check `(1/C) T (1/C) T alpha = (1/C) T alpha` with `T` the Gram matrix on
/// an index set closed under the two-step dependencies of `alpha`.
pub fn kernel_idempotent_check(
    fs: &FrameSpec,
    alpha: &SampledTransform,
    window: Option<&RepSystem>,
) -> Result<KernelCheck> {
    let c = fs.verified_constant()?.clone();
    let t1 = kernel_apply(alpha, fs)?;
    let t2 = kernel_apply(&t1, fs)?;
    let mut dependency = support(alpha)?;
    dependency.extend(support(&t1)?);
    dependency.extend(support(&t2)?);
    let index: Vec<(Rep, usize)> = match window {
        Some(w) => {
            if dependency
                .iter()
                .any(|(r, _)| w.subgroup != fs.subgroup || !w.contains(r))
            {
                return Err(Error::WindowNotClosed);
            }
            window_index(fs, w)?
        }
        None => dependency.into_iter().collect(),
    };
    let t = kernel_matrix(fs, &index)?;
    let a: Vec<ScaledScalar> = index.iter().map(|(r, j)| alpha.get(r, *j)).collect();
    let apply = |v: &[ScaledScalar]| -> Vec<ScaledScalar> {
        t.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(_, x)| !x.is_zero())
                    .fold(ScaledScalar::zero(fs.p), |acc, (m, x)| acc.add(&m.mul(x)))
            })
            .collect()
    };
    let ta = apply(&a);
    let tta = apply(&ta);
    let cs = ScaledScalar::from_rational(fs.p, &c);
    // the matrix route must agree with the analysis route
    let consistent = index.iter().zip(&ta).all(|((r, j), v)| t1.get(r, *j) == *v);
    if !consistent {
        return Err(Error::Internal(
            "Gram matrix disagrees with analysis of the synthesis".into(),
        ));
    }
    let idempotent = tta.iter().zip(&ta).all(|(x, y)| *x == cs.mul(y));
    Ok(KernelCheck {
        idempotent,
        index_size: index.len(),
    })
}

/// A coefficient family from explicit entries, windowed on the spec's subgroup.
pub fn coefficients(fs: &FrameSpec, entries: Vec<Entry>) -> Result<SampledTransform> {
    let (mut n0, mut n1, mut g0) = (0i64, 0i64, fs.subgroup.k);
    for e in &entries {
        n0 = n0.min(e.rep.n);
        n1 = n1.max(e.rep.n);
        if let Some(v) = e.rep.gamma.valuation() {
            g0 = g0.min(v);
        }
    }
    let window = RepSystem::new(fs.p, fs.subgroup, (n0, n1), (g0, fs.subgroup.k))?;
    SampledTransform::from_entries(fs.p, window, fs.wavelets.len(), entries)
}

/// Whether a kernel matrix is the identity.
pub fn is_identity(t: &[Vec<ScaledScalar>]) -> bool {
    t.iter().enumerate().all(|(a, row)| {
        row.iter().enumerate().all(|(b, v)| {
            if a == b {
                v.to_rational() == Some(BigRational::from_integer(1.into()))
            } else {
                v.is_zero()
            }
        })
    })
}

/// Group the entries of a coefficient map by wavelet index.
pub fn entries_by_wavelet(st: &SampledTransform) -> Result<BTreeMap<usize, Vec<Entry>>> {
    let mut out: BTreeMap<usize, Vec<Entry>> = BTreeMap::new();
    for e in st.entries()? {
        out.entry(e.j).or_default().push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::basic_wavelet;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn corollary_p2_constants() {
        let fs = corollary_frame(2, 1).unwrap();
        let pred = fs.predicted().unwrap();
        assert_eq!(pred.ratio, r(2, 1));
        assert!((pred.sqrt_normalized - 1.0).abs() < 1e-12);
        let g = &fs.wavelets[0];
        assert_eq!(frame_sum(g, &fs).unwrap().to_rational(), Some(r(2, 1)));
        let fam = test_family(&fs, 1, 6).unwrap();
        assert_eq!(frame_constant(&fs, &fam), Ok(r(2, 1)));
    }

    #[test]
    fn basic_wavelet_frame() {
        let fs = build_frame(&basic_wavelet(2)).unwrap();
        assert_eq!(fs.subgroup, SpecialSubgroup::new(1, 1));
        assert_eq!(fs.predicted().unwrap().ratio, r(2, 1));
        let fam = test_family(&fs, 2, 6).unwrap();
        assert_eq!(frame_constant(&fs, &fam), Ok(r(2, 1)));
        assert_eq!(build_frame(&StepFunction::ideal_indicator(2, 0)), Err(Error::NotS0));
    }

    #[test]
    fn onb_constant_one() {
        for p in [2u32, 3] {
            let fs = benedetto_onb(p).unwrap();
            assert_eq!(fs.predicted().unwrap().ratio, r(1, 1));
            let fam = test_family(&fs, 3, 6).unwrap();
            assert_eq!(frame_constant(&fs, &fam), Ok(r(1, 1)));
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        for fs in [
            corollary_frame(2, 1).unwrap(),
            benedetto_onb(3).unwrap(),
            corollary_frame(3, 2).unwrap(),
        ] {
            let fam = test_family(&fs, 4, 4).unwrap();
            let fs = verify(&fs, &fam).unwrap();
            for f in &fam {
                let c = analyze_coeffs(f, &fs).unwrap();
                assert_eq!(&reconstruct(&c, &fs).unwrap(), f);
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let fs = verify(
            &corollary_frame(2, 1).unwrap(),
            &test_family(&corollary_frame(2, 1).unwrap(), 5, 3).unwrap(),
        )
        .unwrap();
        let one = PAdicNumber::one(2);
        let r0 = Rep {
            n: 0,
            lambda: one.clone(),
            gamma: PAdicNumber::zero(2),
        };
        let r1 = Rep {
            n: 0,
            lambda: one,
            gamma: PAdicNumber::from_int(2, 1),
        };
        let t = kernel_matrix(&fs, &[(r0.clone(), 0), (r1, 0)]).unwrap();
        assert_eq!(t[0][1], ScaledScalar::from_int(2, -1));
        assert_eq!(t[1][0], t[0][1].conj());
        let alpha = coefficients(
            &fs,
            vec![Entry {
                rep: r0,
                j: 0,
                value: ScaledScalar::one(2),
            }],
        )
        .unwrap();
        let check = kernel_idempotent_check(&fs, &alpha, None).unwrap();
        assert!(check.idempotent);
    }

    #[test]
    fn onb_kernel_is_identity() {
        let fs = benedetto_onb(3).unwrap();
        let w = RepSystem::new(3, fs.subgroup, (-1, 1), (-1, 0)).unwrap();
        let idx = window_index(&fs, &w).unwrap();
        assert!(is_identity(&kernel_matrix(&fs, &idx).unwrap()));
    }
}
