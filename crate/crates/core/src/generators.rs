//! Seeded pseudo-random test functions and coefficient families.

use num_rational::BigRational;
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::affine::{Rep, SpecialSubgroup};
use crate::cwt::Entry;
use crate::padic::{checked_count, PAdicNumber};
use crate::scalars::ScaledScalar;
use crate::stepfn::StepFunction;

/// Shape limits for [`Generator::random_s0`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    /// Classes `(l, k)` stay within `[-bound, bound]`.
    pub bound: i64,
    /// Maximal `k - l`.
    pub max_width: i64,
    /// Maximal number of nonzero cosets.
    pub max_terms: usize,
    /// Allow root-of-unity phases in the coefficients.
    pub phases: bool,
}

impl Shape {
    pub fn desk(p: u32) -> Self {
        Shape {
            bound: 3,
            max_width: if p == 2 { 4 } else { 3 },
            max_terms: 5,
            phases: true,
        }
    }
}

pub struct Generator {
    p: u32,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(p: u32, seed: u64) -> Self {
        Generator {
            p,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn coefficient(&mut self, phases: bool) -> ScaledScalar {
        let p = self.p;
        let mut a: i64 = self.rng.gen_range(1..=3);
        if self.rng.gen_bool(0.5) {
            a = -a;
        }
        let c = ScaledScalar::from_int(p, a);
        if phases && self.rng.gen_bool(0.35) {
            let den = (p as i64).pow(self.rng.gen_range(1..=2));
            let num = self.rng.gen_range(0..den);
            let z = ScaledScalar::root_of_unity(p, &BigRational::new(num.into(), den.into())).expect("p-power phase");
            c.mul(&z)
        } else {
            c
        }
    }

    /// A nonzero mean-zero step function with class inside the shape.
    pub fn random_s0(&mut self, shape: Shape) -> StepFunction {
        let p = self.p;
        let l = self.rng.gen_range(-shape.bound..shape.bound);
        let k = self.rng.gen_range(l + 1..=(l + shape.max_width).min(shape.bound));
        let cosets = checked_count(p, (k - l) as u32).expect("desk-scale window") as usize;
        let terms = self.rng.gen_range(2..=shape.max_terms.max(2)).min(cosets);
        let picks = sample(&mut self.rng, cosets, terms);
        let step = PAdicNumber::prime_power(p, l);
        let mut values = Vec::new();
        let mut total = ScaledScalar::zero(p);
        for (i, j) in picks.iter().enumerate() {
            let x = &PAdicNumber::from_int(p, j as i64) * &step;
            let c = if i + 1 == terms {
                total.neg()
            } else {
                self.coefficient(shape.phases)
            };
            total = total.add(&c);
            values.push((x, c));
        }
        StepFunction::from_values(p, k, values)
    }

    /// A random group element `(x, h)` with `x` in `Z[1/p]` and `h` nonzero.
    pub fn random_element(&mut self, spread: i64) -> (PAdicNumber, PAdicNumber) {
        let p = self.p;
        let den = self.rng.gen_range(0..=spread as u32);
        let x = PAdicNumber::new(p, self.rng.gen_range(-40i64..40), den);
        let unit = loop {
            let u: i64 = self.rng.gen_range(-30..30);
            if u % p as i64 != 0 {
                break u;
            }
        };
        let h = PAdicNumber::from_int(p, unit).mul_pow_p(self.rng.gen_range(-spread..=spread));
        (x, h)
    }

    /// A random element of `P^k x D_m^*`.
    pub fn random_in_subgroup(&mut self, sub: &SpecialSubgroup) -> (PAdicNumber, PAdicNumber) {
        let p = self.p;
        let x = PAdicNumber::from_int(p, self.rng.gen_range(-50i64..50)).mul_pow_p(sub.k);
        let h = if sub.m == 0 {
            loop {
                let u: i64 = self.rng.gen_range(-60..60);
                if u % p as i64 != 0 {
                    break PAdicNumber::from_int(p, u);
                }
            }
        } else {
            let t = PAdicNumber::from_int(p, self.rng.gen_range(-50i64..50)).mul_pow_p(sub.m as i64);
            &PAdicNumber::one(p) + &t
        };
        (x, h)
    }

    /// A finitely supported coefficient family near the identity.
    pub fn random_coeffs(&mut self, sub: &SpecialSubgroup, wavelets: usize, max_terms: usize) -> Vec<Entry> {
        let p = self.p;
        let lambdas = sub.unit_reps(p);
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        let mut out: Vec<Entry> = Vec::new();
        while out.len() < terms {
            let n = self.rng.gen_range(-1..=1);
            let lambda = lambdas[self.rng.gen_range(0..lambdas.len())].clone();
            let gamma = PAdicNumber::from_int(p, self.rng.gen_range(0..(p as i64 * p as i64)))
                .mul_pow_p(sub.k - 1)
                .canonical_rep(sub.k);
            let rep = Rep { n, lambda, gamma };
            let j = self.rng.gen_range(0..wavelets);
            if out.iter().any(|e| e.rep == rep && e.j == j) {
                continue;
            }
            let value = self.coefficient(true);
            out.push(Entry { rep, j, value });
        }
        out
    }

    pub fn gen_range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}
