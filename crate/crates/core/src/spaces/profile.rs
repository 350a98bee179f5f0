//! Radial volume-density profiles `θ̄(r)` of harmonic spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{unit_ball_volume, Jet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Fitted,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Flat,
    /// `(sin(√k r)/(√k r))^{n−1}`.
    Sphere {
        k: f64,
    },
    /// `(sinh(√|k| r)/(√|k| r))^{n−1}`.
    Hyperbolic {
        k: f64,
    },
    /// `cosh^q(r/2) (sinh(r/2)/(r/2))^{p+q}`.
    DamekRicci {
        p: usize,
        q: usize,
    },
    /// `Σ c_i r^i` with one-sigma errors per coefficient.
    Polynomial {
        coeffs: Vec<f64>,
        errors: Vec<f64>,
    },
}

/// `θ̄` together with exact derivatives (or error-carrying ones when fitted).
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    n: usize,
    shape: Shape,
}

impl RadialProfile {
    pub fn flat(n: usize) -> Self {
        Self {
            n,
            shape: Shape::Flat,
        }
    }

    pub fn sphere(n: usize, k: f64) -> Self {
        Self {
            n,
            shape: Shape::Sphere { k },
        }
    }

    pub fn hyperbolic(n: usize, k: f64) -> Self {
        Self {
            n,
            shape: Shape::Hyperbolic { k },
        }
    }

    pub fn damek_ricci(p: usize, q: usize) -> Self {
        Self {
            n: p + q + 1,
            shape: Shape::DamekRicci { p, q },
        }
    }

    /// Polynomial profile from fitted Taylor coefficients and their errors.
    pub fn fitted(n: usize, coeffs: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != errors.len() {
            return Err(Error::Parameter(
                "fitted profile needs matching coefficients and errors".into(),
            ));
        }
        Ok(Self {
            n,
            shape: Shape::Polynomial { coeffs, errors },
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        match self.shape {
            Shape::Polynomial { .. } => Provenance::Fitted,
            _ => Provenance::ClosedForm,
        }
    }

    /// Taylor expansion of `θ̄` about `r`.
    pub fn jet<const N: usize>(&self, r: f64) -> Jet<N> {
        let x = Jet::<N>::variable(r);
        let m = (self.n - 1) as u32;
        match &self.shape {
            Shape::Flat => Jet::constant(1.0),
            Shape::Sphere { k } => x.scale(k.sqrt()).sinc().powi(m),
            Shape::Hyperbolic { k } => x.scale(k.abs().sqrt()).sinhc().powi(m),
            Shape::DamekRicci { p, q } => {
                let h = x.scale(0.5);
                let (_, ch) = h.sinh_cosh();
                ch.powi(*q as u32) * h.sinhc().powi((p + q) as u32)
            }
            Shape::Polynomial { coeffs, .. } => {
                let mut acc = Jet::constant(0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * x;
                    acc.c[0] += c;
                }
                acc
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet::<1>(r).value()
    }

    /// `d^k θ̄ / dr^k` at `r`, for `k ≤ 3`.
    pub fn derivative(&self, k: usize, r: f64) -> f64 {
        assert!(k <= 3, "derivatives above third order are not tabulated");
        self.jet::<4>(r).derivative(k)
    }

    /// One-sigma error of the `k`-th derivative at `r`; zero for closed forms.
    pub fn derivative_error(&self, k: usize, r: f64) -> f64 {
        match &self.shape {
            Shape::Polynomial { errors, .. } => errors
                .iter()
                .enumerate()
                .filter(|(i, _)| *i >= k)
                .map(|(i, e)| {
                    let falling: f64 = ((i - k + 1)..=i).map(|f| f as f64).product();
                    e * falling * r.abs().powi((i - k) as i32)
                })
                .sum(),
            _ => 0.0,
        }
    }

    /// Taylor coefficients `a_0 … a_K` at the origin.
    pub fn taylor(&self, order: usize) -> Vec<f64> {
        let j = self.jet::<16>(0.0);
        assert!(order < 16, "Taylor order above 15 is not tabulated");
        j.c[..=order].to_vec()
    }

    /// Jet of `v(r) = ω_{n−1} r^{n−1} θ̄(r)`.
    pub fn ball_volume_jet<const N: usize>(&self, r: f64) -> Jet<N> {
        let x = Jet::<N>::variable(r);
        x.powi((self.n - 1) as u32)
            .scale(unit_ball_volume(self.n - 1))
            * self.jet::<N>(r)
    }

    /// Constant Ricci curvature `ρ = −3θ̄″(0)`.
    pub fn ricci_constant(&self) -> f64 {
        -3.0 * self.derivative(2, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let dr = RadialProfile::damek_ricci(2, 1);
        let expect = 0.5f64.cosh() * (0.5f64.sinh() / 0.5).powi(3);
        assert!((dr.value(1.0) - expect).abs() < 1e-15);
        assert!((dr.value(1.0) - 1.276458).abs() < 5e-7);
        let h3 = RadialProfile::hyperbolic(3, -1.0);
        assert!((h3.value(0.5) - 1.0861613).abs() < 5e-7);
        assert_eq!(RadialProfile::flat(3).value(0.7), 1.0);
    }

    #[test]
    fn sphere_taylor_and_ricci() {
        let s3 = RadialProfile::sphere(3, 1.0);
        let a = s3.taylor(4);
        assert!((a[0] - 1.0).abs() < 1e-15);
        assert!(a[1].abs() < 1e-15);
        assert!((a[2] + 1.0 / 3.0).abs() < 1e-15);
        assert!((a[4] - 2.0 / 45.0).abs() < 1e-15);
        assert!((s3.ricci_constant() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn damek_ricci_ricci_constant() {
        // −3θ̄″(0) = −(p + 4q)/4.
        for (p, q) in [(2, 1), (4, 3), (8, 3)] {
            let rho = RadialProfile::damek_ricci(p, q).ricci_constant();
            assert!(
                (rho + (p + 4 * q) as f64 / 4.0).abs() < 1e-13,
                "p={p} q={q}"
            );
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let prof = RadialProfile::damek_ricci(4, 3);
        let (r, h) = (0.6, 1e-4);
        let d1 = (prof.value(r + h) - prof.value(r - h)) / (2.0 * h);
        assert!((prof.derivative(1, r) - d1).abs() < 1e-7);
    }
}
