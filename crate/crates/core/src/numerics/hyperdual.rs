//! Hyper-dual numbers `a + b ε₁ + c ε₂ + d ε₁ε₂` with `ε₁² = ε₂² = 0`.
//!
//! Seeding `ε₁` along `∂_i` and `ε₂` along `∂_j` makes the `ε₁ε₂` part of
//! `f(x)` the exact mixed second derivative `∂_i∂_j f`, free of truncation
//! and cancellation error.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar field used by analytic metric formulas.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, k: i32) -> Self;
    fn recip(self) -> Self;
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn recip(self) -> Self {
        f64::recip(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub const fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        Self { re, e1, e2, e12 }
    }

    /// Applies a scalar function given its value and first two derivatives at `re`.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self {
            re: f0,
            e1: f1 * self.e1,
            e2: f1 * self.e2,
            e12: f1 * self.e12 + f2 * self.e1 * self.e2,
        }
    }
}

impl Add for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(
            self.re + o.re,
            self.e1 + o.e1,
            self.e2 + o.e2,
            self.e12 + o.e12,
        )
    }
}

impl Sub for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.re - o.re,
            self.e1 - o.e1,
            self.e2 - o.e2,
            self.e12 - o.e12,
        )
    }
}

impl Mul for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
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
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl AddAssign for HyperDual {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for HyperDual {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for HyperDual {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Add<f64> for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        Self::new(self.re + o, self.e1, self.e2, self.e12)
    }
}

impl Sub<f64> for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        Self::new(self.re - o, self.e1, self.e2, self.e12)
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Self::new(self.re * o, self.e1 * o, self.e2 * o, self.e12 * o)
    }
}

impl Div<f64> for HyperDual {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl Real for HyperDual {
    fn cst(v: f64) -> Self {
        Self::new(v, 0.0, 0.0, 0.0)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.re.sinh(), self.re.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.re.sinh(), self.re.cosh());
        self.chain(c, s, c)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.re;
        self.chain(self.re.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.re))
    }
    fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::cst(1.0),
            1 => self,
            _ => {
                let kf = k as f64;
                let p2 = self.re.powi(k - 2);
                self.chain(
                    p2 * self.re * self.re,
                    kf * p2 * self.re,
                    kf * (kf - 1.0) * p2,
                )
            }
        }
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.re;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(x: f64) -> HyperDual {
        HyperDual::new(x, 1.0, 1.0, 0.0)
    }

    fn check<F: Fn(HyperDual) -> HyperDual, G: Fn(f64) -> f64>(f: F, g: G, x: f64) {
        let h = 1e-4;
        let v = f(seeded(x));
        let d1 = (g(x + h) - g(x - h)) / (2.0 * h);
        let d2 = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
        assert!((v.re - g(x)).abs() < 1e-14 * (1.0 + g(x).abs()));
        assert!(
            (v.e1 - d1).abs() < 1e-7 * (1.0 + d1.abs()),
            "{} vs {}",
            v.e1,
            d1
        );
        assert!(
            (v.e12 - d2).abs() < 1e-5 * (1.0 + d2.abs()),
            "{} vs {}",
            v.e12,
            d2
        );
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        let x = 0.7;
        check(|a| a.sin(), f64::sin, x);
        check(|a| a.cos(), f64::cos, x);
        check(|a| a.sinh(), f64::sinh, x);
        check(|a| a.cosh(), f64::cosh, x);
        check(|a| a.exp(), f64::exp, x);
        check(|a| a.ln(), f64::ln, x);
        check(|a| a.sqrt(), f64::sqrt, x);
        check(|a| a.powi(3), |t| t.powi(3), x);
        check(|a| a.powi(-2), |t| t.powi(-2), x);
        check(|a| a.recip(), f64::recip, x);
        check(
            |a| a.sin() * a.exp() / (a * a + 1.0),
            |t| t.sin() * t.exp() / (t * t + 1.0),
            x,
        );
    }

    #[test]
    fn mixed_partial_of_product() {
        // f(x, y) = x² y³ at (2, 3): ∂x∂y f = 6 x y² = 108.
        let x = HyperDual::new(2.0, 1.0, 0.0, 0.0);
        let y = HyperDual::new(3.0, 0.0, 1.0, 0.0);
        let f = x.powi(2) * y.powi(3);
        assert_eq!(f.re, 108.0);
        assert_eq!(f.e1, 108.0);
        assert_eq!(f.e2, 108.0);
        assert_eq!(f.e12, 108.0);
    }
}
