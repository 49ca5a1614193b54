//! Hyper-dual numbers for exact first and second derivatives.
//!
//! A hyper-dual number `a + b ε₁ + c ε₂ + d ε₁ε₂` with `ε₁² = ε₂² = 0`
//! carries, after seeding `ε₁` on variable `i` and `ε₂` on variable `j`, the
//! value, both first partials and the mixed second partial `∂²f/∂xᵢ∂xⱼ`, all
//! free of truncation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic needed by the Lagrangians. Implemented for `f64` and
/// [`HyperDual`].
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn sq(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub const fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        HyperDual { re, e1, e2, e12 }
    }

    pub const fn constant(re: f64) -> Self {
        HyperDual::new(re, 0.0, 0.0, 0.0)
    }

    /// Apply a scalar function given its value and first two derivatives at `re`.
    #[inline]
    fn chain(self, g: f64, dg: f64, d2g: f64) -> Self {
        HyperDual {
            re: g,
            e1: dg * self.e1,
            e2: dg * self.e2,
            e12: dg * self.e12 + d2g * self.e1 * self.e2,
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.re;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        HyperDual::new(self.re + o.re, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        HyperDual::new(self.re - o.re, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        HyperDual::new(
            self.re * o.re,
            self.re * o.e1 + self.e1 * o.re,
            self.re * o.e2 + self.e2 * o.re,
            self.re * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.re,
        )
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl Add<f64> for HyperDual {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        HyperDual { re: self.re + o, ..self }
    }
}

impl Sub<f64> for HyperDual {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        HyperDual { re: self.re - o, ..self }
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        HyperDual::new(self.re * o, self.e1 * o, self.e2 * o, self.e12 * o)
    }
}

impl Div<f64> for HyperDual {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl Real for HyperDual {
    fn cst(v: f64) -> Self {
        HyperDual::constant(v)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.re))
    }
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(c, -s, -c)
    }
}

fn seeded<const N: usize>(x: &[f64; N], i: usize, j: usize) -> [HyperDual; N] {
    std::array::from_fn(|k| {
        HyperDual::new(
            x[k],
            if k == i { 1.0 } else { 0.0 },
            if k == j { 1.0 } else { 0.0 },
            0.0,
        )
    })
}

/// Value and gradient of `f` at `x`.
pub fn gradient<const N: usize, F>(f: F, x: &[f64; N]) -> (f64, [f64; N])
where
    F: Fn(&[HyperDual; N]) -> HyperDual,
{
    let mut g = [0.0; N];
    let mut value = 0.0;
    for (i, gi) in g.iter_mut().enumerate() {
        let out = f(&seeded(x, i, usize::MAX));
        value = out.re;
        *gi = out.e1;
    }
    (value, g)
}

/// Full Hessian of `f` at `x`, one hyper-dual evaluation per unordered pair.
pub fn hessian<const N: usize, F>(f: F, x: &[f64; N]) -> [[f64; N]; N]
where
    F: Fn(&[HyperDual; N]) -> HyperDual,
{
    let mut h = [[0.0; N]; N];
    for i in 0..N {
        for j in i..N {
            let d = f(&seeded(x, i, j)).e12;
            h[i][j] = d;
            h[j][i] = d;
        }
    }
    h
}

/// Central-difference Hessian, step `ε^{1/3}·(1+|xᵢ|)` per coordinate.
pub fn fd_hessian<const N: usize, F>(f: F, x: &[f64; N]) -> [[f64; N]; N]
where
    F: Fn(&[f64; N]) -> f64,
{
    let steps: [f64; N] = std::array::from_fn(|i| f64::EPSILON.cbrt() * (1.0 + x[i].abs()));
    let shifted = |i: usize, si: f64, j: usize, sj: f64| {
        let mut y = *x;
        y[i] += si;
        y[j] += sj;
        f(&y)
    };
    let mut h = [[0.0; N]; N];
    for i in 0..N {
        for j in i..N {
            let (hi, hj) = (steps[i], steps[j]);
            let d = if i == j {
                let mut yp = *x;
                let mut ym = *x;
                yp[i] += hi;
                ym[i] -= hi;
                (f(&yp) - 2.0 * f(x) + f(&ym)) / (hi * hi)
            } else {
                (shifted(i, hi, j, hj) - shifted(i, hi, j, -hj) - shifted(i, -hi, j, hj)
                    + shifted(i, -hi, j, -hj))
                    / (4.0 * hi * hj)
            };
            h[i][j] = d;
            h[j][i] = d;
        }
    }
    h
}

/// Central-difference gradient with step `h` (absolute).
pub fn fd_gradient<const N: usize, F>(f: F, x: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> f64,
{
    std::array::from_fn(|i| {
        let mut yp = *x;
        let mut ym = *x;
        yp[i] += h;
        ym[i] -= h;
        (f(&yp) - f(&ym)) / (2.0 * h)
    })
}
