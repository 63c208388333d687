//! Fourier transform on step functions, `f^(xi) = int f(y) chi(-xi y) dy`.
//!
//! For `f` in `S_l^k` the transform lies in `S_{-k}^{-l}`; on the coset of
//! `xi_i = i p^{-k}` it equals `q^{-k} sum_j f(j p^l) zeta^{-ij}` with `zeta` a
//! primitive `p^{k-l}`-th root of unity, so each output value is one
//! character sum.

use crate::error::Result;
use crate::padic::{checked_count, q_pow, PAdicNumber};
use crate::scalars::Scalar;
use crate::stepfn::StepFunction;

fn transform<S: Scalar>(f: &StepFunction<S>, sign: i64) -> Result<StepFunction<S>> {
    let p = f.p();
    let f = f.coarsen();
    let k = f.resolution();
    let Some(l) = f.support_exponent() else {
        return Ok(StepFunction::zero(p, -k));
    };
    let w = (k - l) as u32;
    let len = checked_count(p, w)?;
    let samples: Vec<(u64, &S)> = f
        .terms()
        .map(|(c, v)| {
            let j: u64 = c.scaled_index(l).try_into().expect("index below p^w");
            (j, v)
        })
        .collect();
    let norm = q_pow(p, -k);
    let step = PAdicNumber::prime_power(p, -k);
    let mut values = Vec::new();
    let mut terms: Vec<(u64, &S)> = Vec::with_capacity(samples.len());
    for i in 0..len {
        terms.clear();
        for (j, v) in &samples {
            let e = ((i as u128 * *j as u128) % len as u128) as u64;
            let e = if sign < 0 { (len - e) % len } else { e };
            terms.push((e, *v));
        }
        let s = S::character_sum(p, w, &terms);
        if !s.is_zero() {
            let xi = &PAdicNumber::from_int(p, i as i64) * &step;
            values.push((xi, s.scale_rational(&norm)));
        }
    }
    Ok(StepFunction::from_values(p, -l, values))
}

/// `f^(xi) = int f(y) chi(-xi y) dy`.
pub fn fourier<S: Scalar>(f: &StepFunction<S>) -> Result<StepFunction<S>> {
    transform(f, -1)
}

/// `f(x) = int f^(xi) chi(x xi) d xi`.
pub fn inverse_fourier<S: Scalar>(f: &StepFunction<S>) -> Result<StepFunction<S>> {
    transform(f, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ScaledScalar;
    use crate::stepfn::basic_wavelet;
    use num_rational::BigRational;

    type F = StepFunction;

    fn n(p: u32, num: i64, e: u32) -> PAdicNumber {
        PAdicNumber::new(p, num, e)
    }

    fn shell(p: u32, k: i64) -> F {
        F::ideal_indicator(p, -k).sub(&F::ideal_indicator(p, -k + 1))
    }

    #[test]
    fn ideal_indicators() {
        for p in [2u32, 3, 5] {
            for k in -2..3 {
                let f = F::ideal_indicator(p, k);
                let expected = F::ideal_indicator(p, -k).scale_rational(&q_pow(p, -k));
                assert_eq!(fourier(&f).unwrap(), expected);
                assert_eq!(inverse_fourier(&expected).unwrap(), f);
            }
        }
    }

    #[test]
    fn basic_wavelet_transform() {
        for p in [2u32, 3] {
            let g = basic_wavelet(p);
            assert_eq!(fourier(&g).unwrap(), shell(p, 1).neg());
        }
    }

    #[test]
    fn phi_transform_is_shell() {
        for k in -1..3 {
            let p = 3;
            let phi = F::ideal_indicator(p, k)
                .scale_rational(&q_pow(p, k))
                .sub(&F::ideal_indicator(p, k - 1).scale_rational(&q_pow(p, k - 1)));
            assert_eq!(fourier(&phi).unwrap(), shell(p, k));
        }
    }

    #[test]
    fn corollary_wavelet_from_inverse() {
        // inverse transform of 1_{1/2 + D} at p = 2: chi(x/2) on D
        let ind = F::ball(2, &n(2, 1, 1), 0, ScaledScalar::one(2));
        let g = inverse_fourier(&ind).unwrap();
        assert_eq!(g.evaluate(&n(2, 0, 0)), ScaledScalar::one(2));
        assert_eq!(g.evaluate(&n(2, 1, 0)), ScaledScalar::from_int(2, -1));
        assert_eq!(g.membership_class(), Ok((0, 1)));
    }

    #[test]
    fn round_trip_with_phases() {
        let p = 3;
        let f = F::from_values(
            p,
            2,
            [
                (
                    n(p, 1, 1),
                    ScaledScalar::root_of_unity(p, &BigRational::new(1.into(), 9.into())).unwrap(),
                ),
                (n(p, 4, 0), ScaledScalar::sqrt_q_pow(p, 1)),
                (n(p, 0, 0), ScaledScalar::from_int(p, -2)),
            ],
        );
        let ft = fourier(&f).unwrap();
        assert_eq!(inverse_fourier(&ft).unwrap(), f);
        assert_eq!(ft.norm_sq(), f.norm_sq());
        assert_eq!(fourier(&ft).unwrap(), f.reflect());
    }
}
