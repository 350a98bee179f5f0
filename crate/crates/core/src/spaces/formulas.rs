//! Coordinate formulas of the built-in metrics.

use crate::manifold::MetricFormula;
use crate::numerics::Real;

/// Flat `ℝⁿ` in Cartesian coordinates.
#[derive(Debug, Clone)]
pub struct Flat {
    pub n: usize,
}

impl MetricFormula for Flat {
    fn dim(&self) -> usize {
        self.n
    }
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    fn eval<T: Real>(&self, _x: &[T], g: &mut [T]) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                g[a * n + b] = T::cst(if a == b { 1.0 } else { 0.0 });
            }
        }
    }
}

/// Round sphere of curvature `k` in the gnomonic chart.
///
/// `x ↦ (x, 1)/√(1+|x|²)` scaled by `1/√k`; covers the open hemisphere about
/// the chart center and maps great circles to straight lines.
#[derive(Debug, Clone)]
pub struct Gnomonic {
    pub n: usize,
    pub k: f64,
}

impl MetricFormula for Gnomonic {
    fn dim(&self) -> usize {
        self.n
    }
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    fn eval<T: Real>(&self, x: &[T], g: &mut [T]) {
        let n = self.n;
        let mut q = T::cst(1.0);
        for xi in x {
            q += *xi * *xi;
        }
        let inv = (q * q * self.k).recip();
        for a in 0..n {
            for b in a..n {
                let mut v = -(x[a] * x[b]);
                if a == b {
                    v += q;
                }
                g[a * n + b] = v * inv;
                g[b * n + a] = v * inv;
            }
        }
    }
}

/// Round `S²` of curvature `k` in colatitude/longitude `(θ, φ)`.
#[derive(Debug, Clone)]
pub struct PolarS2 {
    pub k: f64,
}

impl MetricFormula for PolarS2 {
    fn dim(&self) -> usize {
        2
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0] < std::f64::consts::PI
    }
    fn eval<T: Real>(&self, x: &[T], g: &mut [T]) {
        let s = x[0].sin();
        g[0] = T::cst(1.0 / self.k);
        g[1] = T::cst(0.0);
        g[2] = T::cst(0.0);
        g[3] = s * s / self.k;
    }
}

/// Hyperbolic space of curvature `k < 0` in the upper half-space model.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub n: usize,
    pub k: f64,
}

impl MetricFormula for HalfSpace {
    fn dim(&self) -> usize {
        self.n
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[self.n - 1] > 0.0
    }
    fn eval<T: Real>(&self, x: &[T], g: &mut [T]) {
        let n = self.n;
        let y = x[n - 1];
        let c = (y * y * self.k.abs()).recip();
        for a in 0..n {
            for b in 0..n {
                g[a * n + b] = if a == b { c } else { T::cst(0.0) };
            }
        }
    }
}

/// Ellipsoid `(a sin u cos v, b sin u sin v, c cos u)` with the induced metric.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    pub axes: [f64; 3],
    /// Distance kept from the coordinate singularities at the poles.
    pub pole_margin: f64,
}

impl MetricFormula for Ellipsoid {
    fn dim(&self) -> usize {
        2
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[0] > self.pole_margin && x[0] < std::f64::consts::PI - self.pole_margin
    }
    fn eval<T: Real>(&self, x: &[T], g: &mut [T]) {
        let [a, b, c] = self.axes;
        let (su, cu) = (x[0].sin(), x[0].cos());
        let (sv, cv) = (x[1].sin(), x[1].cos());
        let xu = [cu * cv * a, cu * sv * b, -(su * c)];
        let xv = [-(su * sv * a), su * cv * b, T::cst(0.0)];
        let dot = |p: &[T; 3], q: &[T; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        g[0] = dot(&xu, &xu);
        g[1] = dot(&xu, &xv);
        g[2] = g[1];
        g[3] = dot(&xv, &xv);
    }
}
