//! Brute-force float oracles on finite grids, written against the definitions
//! only. Points are `a / p^e` with `i128` numerators; a function supported on
//! `P^lo` and constant on `P^hi`-cosets is a vector indexed by `j`, the cell
//! of `j p^lo`.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use ultrawave::padic::PAdicNumber;
use ultrawave::scalars::Scalar;
use ultrawave::stepfn::StepFunction;

pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pt {
    pub a: i128,
    pub e: u32,
}

pub fn ipow(p: u32, e: u32) -> i128 {
    (p as i128).pow(e)
}

impl Pt {
    pub fn new(p: u32, a: i128, e: i64) -> Self {
        if e >= 0 {
            Pt { a, e: e as u32 }
        } else {
            Pt {
                a: a * ipow(p, (-e) as u32),
                e: 0,
            }
        }
    }

    fn lift(self, p: u32, e: u32) -> i128 {
        self.a * ipow(p, e - self.e)
    }

    pub fn add(self, p: u32, o: Pt) -> Pt {
        let e = self.e.max(o.e);
        Pt {
            a: self.lift(p, e) + o.lift(p, e),
            e,
        }
    }

    pub fn neg(self) -> Pt {
        Pt { a: -self.a, e: self.e }
    }

    pub fn mul(self, o: Pt) -> Pt {
        Pt {
            a: self.a * o.a,
            e: self.e + o.e,
        }
    }

    /// `{x}_p`, the p-adic fractional part, as a float in `[0, 1)`.
    pub fn frac(self, p: u32) -> f64 {
        let d = ipow(p, self.e);
        self.a.rem_euclid(d) as f64 / d as f64
    }

    pub fn to_padic(self, p: u32) -> PAdicNumber {
        PAdicNumber::new(p, self.a, self.e)
    }
}

pub fn chi(p: u32, x: Pt) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x.frac(p))
}

/// Inverse of an integer unit modulo `p^m`.
pub fn unit_inverse(p: u32, u: i128, m: u32) -> i128 {
    let md = ipow(p, m);
    let (mut r0, mut r1) = (md, u.rem_euclid(md));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{u} is not a unit mod {p}^{m}");
    t0.rem_euclid(md)
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub p: u32,
    pub lo: i64,
    pub hi: i64,
    pub v: Vec<Complex64>,
}

impl Grid {
    pub fn len(p: u32, lo: i64, hi: i64) -> usize {
        ipow(p, (hi - lo) as u32) as usize
    }

    pub fn point(&self, j: usize) -> Pt {
        Pt::new(self.p, j as i128, -self.lo)
    }

    pub fn cell(&self) -> f64 {
        (self.p as f64).powi(-(self.hi as i32))
    }

    pub fn sample<S: Scalar>(f: &StepFunction<S>, lo: i64, hi: i64) -> Grid {
        let p = f.p();
        let mut g = Grid {
            p,
            lo,
            hi,
            v: vec![Complex64::new(0.0, 0.0); Self::len(p, lo, hi)],
        };
        for j in 0..g.v.len() {
            g.v[j] = f.evaluate(&g.point(j).to_padic(p)).to_complex().unwrap();
        }
        g
    }

    pub fn integral(&self) -> Complex64 {
        self.v.iter().sum::<Complex64>() * self.cell()
    }

    pub fn norm_sq(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell()
    }

    /// `f^(xi) = int f(y) chi(-xi y) dy`, returned on `P^{-hi}` with resolution `P^{-lo}`.
    pub fn fourier(&self) -> Grid {
        let p = self.p;
        let (lo, hi) = (-self.hi, -self.lo);
        let mut out = Grid {
            p,
            lo,
            hi,
            v: vec![Complex64::new(0.0, 0.0); Self::len(p, lo, hi)],
        };
        for i in 0..out.v.len() {
            let xi = out.point(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, fy) in self.v.iter().enumerate() {
                acc += fy * chi(p, xi.mul(self.point(j)).neg());
            }
            out.v[i] = acc * self.cell();
        }
        out
    }

    pub fn max_diff<S: Scalar>(&self, f: &StepFunction<S>) -> f64 {
        let other = Grid::sample(f, self.lo, self.hi);
        self.v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `int |g^(xi)|^2 / |xi| d xi` from the grid transform of `g`.
pub fn admissibility(g: &Grid) -> f64 {
    let p = g.p as f64;
    let gh = g.fourier();
    let mut acc = 0.0;
    for (i, v) in gh.v.iter().enumerate() {
        if i == 0 {
            // the cell of 0 is P^{-lo(g)}, where g^ vanishes for mean-zero g
            assert!(v.norm() < TOL, "admissibility oracle needs mean zero");
            continue;
        }
        let xi = gh.point(i);
        let val = valuation(g.p, xi);
        acc += v.norm_sqr() * gh.cell() * p.powi(val as i32);
    }
    acc
}

pub fn valuation(p: u32, x: Pt) -> i64 {
    assert!(x.a != 0);
    let mut a = x.a;
    let mut v = -(x.e as i64);
    while a % p as i128 == 0 {
        a /= p as i128;
        v += 1;
    }
    v
}

/// `(f * g)(x) = int f(y) g(x - y) dy` for `f` on the grid and `g` evaluated
/// pointwise; output on the same grid.
pub fn convolve<S: Scalar>(f: &Grid, g: &StepFunction<S>) -> Grid {
    let p = f.p;
    let mut out = f.clone();
    for i in 0..f.v.len() {
        let x = f.point(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, fy) in f.v.iter().enumerate() {
            if fy.norm() == 0.0 {
                continue;
            }
            let z = x.add(p, f.point(j).neg());
            acc += fy * g.evaluate(&z.to_padic(p)).to_complex().unwrap();
        }
        out.v[i] = acc * f.cell();
    }
    out
}

/// `W_g f(x, h) = int f(y) conj(|h|^{-1/2} g(h^{-1}(y - x))) dy` for
/// `h = p^n u` with an integer unit `u`, by quadrature on the grid of `f`.
///
/// `f_grid` must be fine enough that `pi(x,h) g` is constant on its cells
/// (resolution at least `k_g + n`).
pub fn transform_point<S: Scalar>(f_grid: &Grid, g: &StepFunction<S>, x: Pt, n: i64, u: i128) -> Complex64 {
    let p = f_grid.p;
    let kg = g.resolution();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, fy) in f_grid.v.iter().enumerate() {
        if fy.norm() == 0.0 {
            continue;
        }
        let z = f_grid.point(j).add(p, x.neg());
        // h^{-1} z = u^{-1} z p^{-n}; only its class mod P^{kg} matters
        let m = (kg + z.e as i64 + n).max(1) as u32 + 1;
        let uinv = unit_inverse(p, u, m);
        let scaled = Pt {
            a: (uinv * z.a).rem_euclid(ipow(p, m)),
            e: z.e,
        };
        let w = Pt::new(p, scaled.a, scaled.e as i64 + n);
        let gv = g.evaluate(&w.to_padic(p)).to_complex().unwrap();
        acc += fy * gv.conj();
    }
    acc * f_grid.cell() * (p as f64).powf(n as f64 / 2.0)
}
