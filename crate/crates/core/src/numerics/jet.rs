//! Truncated Taylor series `Σ_{k<N} c_k h^k` about a base point.
//!
//! Used to evaluate closed-form radial profiles together with any number of
//! derivatives, and their Taylor coefficients at the origin.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded about `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x0;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the base point.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k] * f
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Self { c }
    }

    fn nilpotent(self) -> Self {
        let mut c = self.c;
        c[0] = 0.0;
        Self { c }
    }

    /// Evaluates `Σ a_k h^k` on the nilpotent part `h` by Horner's rule.
    fn compose_nilpotent(h: Self, coeffs: &[f64]) -> Self {
        let mut acc = Self::constant(0.0);
        for &a in coeffs.iter().rev() {
            acc = acc * h;
            acc.c[0] += a;
        }
        acc
    }

    fn inv_factorials() -> [f64; N] {
        let mut f = [1.0; N];
        for k in 1..N {
            f[k] = f[k - 1] / k as f64;
        }
        f
    }

    pub fn exp(self) -> Self {
        let h = self.nilpotent();
        Self::compose_nilpotent(h, &Self::inv_factorials()).scale(self.c[0].exp())
    }

    /// Returns `(sin, cos)` of the series.
    pub fn sin_cos(self) -> (Self, Self) {
        let h = self.nilpotent();
        let f = Self::inv_factorials();
        let mut sc = [0.0; N];
        let mut cc = [0.0; N];
        for k in 0..N {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                cc[k] = sign * f[k];
            } else {
                sc[k] = sign * f[k];
            }
        }
        let sh = Self::compose_nilpotent(h, &sc);
        let ch = Self::compose_nilpotent(h, &cc);
        let (s0, c0) = self.c[0].sin_cos();
        (sh.scale(c0) + ch.scale(s0), ch.scale(c0) - sh.scale(s0))
    }

    /// Returns `(sinh, cosh)` of the series.
    pub fn sinh_cosh(self) -> (Self, Self) {
        let h = self.nilpotent();
        let f = Self::inv_factorials();
        let mut sc = [0.0; N];
        let mut cc = [0.0; N];
        for k in 0..N {
            if k % 2 == 0 {
                cc[k] = f[k];
            } else {
                sc[k] = f[k];
            }
        }
        let sh = Self::compose_nilpotent(h, &sc);
        let ch = Self::compose_nilpotent(h, &cc);
        let (s0, c0) = (self.c[0].sinh(), self.c[0].cosh());
        (sh.scale(c0) + ch.scale(s0), ch.scale(c0) + sh.scale(s0))
    }

    pub fn recip(self) -> Self {
        let a0 = self.c[0];
        let mut out = [0.0; N];
        out[0] = 1.0 / a0;
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * out[k - j];
            }
            out[k] = -s / a0;
        }
        Self { c: out }
    }

    pub fn powi(self, k: u32) -> Self {
        let mut result = Self::constant(1.0);
        let mut base = self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    /// `sin(x)/x`, continuous through `x = 0`.
    pub fn sinc(self) -> Self {
        if self.c[0].abs() > 0.5 {
            let (s, _) = self.sin_cos();
            return s * self.recip();
        }
        Self::even_entire(self, |k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / factorial(2 * k + 1)
        })
    }

    /// `sinh(x)/x`, continuous through `x = 0`.
    pub fn sinhc(self) -> Self {
        if self.c[0].abs() > 0.5 {
            let (s, _) = self.sinh_cosh();
            return s * self.recip();
        }
        Self::even_entire(self, |k| 1.0 / factorial(2 * k + 1))
    }

    /// Evaluates `Σ b_k x^{2k}` for an entire even series, near the origin.
    fn even_entire(x: Self, b: impl Fn(usize) -> f64) -> Self {
        let x2 = x * x;
        let terms = 24;
        let mut acc = Self::constant(0.0);
        for k in (0..terms).rev() {
            acc = acc * x2;
            acc.c[0] += b(k);
        }
        acc
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Self { c }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a -= b;
        }
        Self { c }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..N - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Self { c }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_taylor_coefficients_at_origin() {
        let x = Jet::<10>::variable(0.0);
        let s = x.sinc();
        let expect = [1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0, 0.0, -1.0 / 5040.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((s.c[k] - e).abs() < 1e-16, "k={k}");
        }
    }

    #[test]
    fn branches_of_sinhc_agree() {
        // Both sides of the branch switch at 0.5 must describe the same function.
        let a = Jet::<5>::variable(0.5 - 1e-12).sinhc();
        let b = Jet::<5>::variable(0.5 + 1e-12).sinhc();
        for k in 0..5 {
            assert!((a.c[k] - b.c[k]).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn derivatives_of_composite() {
        // f(x) = exp(sin x) at x = 0.3; f' = cos x·f, f'' = (cos²x − sin x)·f.
        let x0 = 0.3_f64;
        let (s, _) = Jet::<4>::variable(x0).sin_cos();
        let f = s.exp();
        let fv = x0.sin().exp();
        assert!((f.derivative(0) - fv).abs() < 1e-15);
        assert!((f.derivative(1) - x0.cos() * fv).abs() < 1e-15);
        assert!((f.derivative(2) - (x0.cos().powi(2) - x0.sin()) * fv).abs() < 1e-14);
    }

    #[test]
    fn recip_and_powi() {
        let x = Jet::<6>::variable(2.0);
        let y = x.powi(3) * x.recip();
        let z = x * x;
        for k in 0..6 {
            assert!((y.c[k] - z.c[k]).abs() < 1e-13);
        }
    }
}
