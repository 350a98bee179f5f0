//! Damek–Ricci spaces `S = N ⋊ ℝ` over generalized Heisenberg algebras `𝔫 = 𝔳 ⊕ 𝔷`.
//!
//! Coordinates `(V, Z, s) ∈ ℝ^p × ℝ^q × ℝ` via `(V, Z, s) ↦ exp(V + Z)·exp(sA)`.
//! The left-invariant orthonormal frame is
//! `E_s = ∂_s`, `X_i = e^{s/2}(∂_{V_i} + ½ Σ_α (J_α V)_i ∂_{Z_α})`, `Y_α = e^s ∂_{Z_α}`,
//! so that `[A, X] = X/2`, `[A, Y] = Y` and `[X_i, X_j] = Σ_α ⟨J_α X_i, X_j⟩ Y_α`.
//! Its dual coframe gives
//! `g = ds² + e^{-s}|dV|² + e^{-2s} Σ_α (dZ_α − ½⟨J_α V, dV⟩)²`.

use crate::error::{Error, Result};
use crate::manifold::MetricFormula;
use crate::numerics::Real;

/// Row-major `p × p` matrices `J_α`, one per center direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordData {
    pub p: usize,
    pub maps: Vec<Vec<f64>>,
}

impl CliffordData {
    /// Standard complex structure on `ℝ^p`, `p` even.
    pub fn complex(p: usize) -> Result<Self> {
        if p == 0 || p % 2 != 0 {
            return Err(Error::Algebra(format!(
                "q = 1 needs even p > 0, got p = {p}"
            )));
        }
        let mut j = vec![0.0; p * p];
        for b in 0..p / 2 {
            let (e, f) = (2 * b, 2 * b + 1);
            j[f * p + e] = 1.0;
            j[e * p + f] = -1.0;
        }
        Ok(Self { p, maps: vec![j] })
    }

    /// Left multiplication by `i, j, k` on `ℍ^{p/4}`, `p ≡ 0 mod 4`.
    pub fn quaternionic(p: usize) -> Result<Self> {
        if p == 0 || p % 4 != 0 {
            return Err(Error::Algebra(format!(
                "q = 3 needs p divisible by 4, got p = {p}"
            )));
        }
        // Images of the basis (1, i, j, k) as (target index, sign).
        let tables: [[(usize, f64); 4]; 3] = [
            [(1, 1.0), (0, -1.0), (3, 1.0), (2, -1.0)],
            [(2, 1.0), (3, -1.0), (0, -1.0), (1, 1.0)],
            [(3, 1.0), (2, 1.0), (1, -1.0), (0, -1.0)],
        ];
        let maps = tables
            .iter()
            .map(|t| {
                let mut m = vec![0.0; p * p];
                for block in 0..p / 4 {
                    let o = 4 * block;
                    for (col, &(row, sign)) in t.iter().enumerate() {
                        m[(o + row) * p + o + col] = sign;
                    }
                }
                m
            })
            .collect();
        Ok(Self { p, maps })
    }

    pub fn shipped(p: usize, q: usize) -> Result<Self> {
        match q {
            1 => Self::complex(p),
            3 => Self::quaternionic(p),
            _ => Err(Error::Algebra(format!(
                "no shipped J-maps for q = {q}; supply j_maps explicitly"
            ))),
        }
    }

    pub fn q(&self) -> usize {
        self.maps.len()
    }

    /// Largest entry of `J_α + J_αᵀ` and of `J_αJ_β + J_βJ_α + 2δ_αβ I`.
    pub fn clifford_residual(&self) -> f64 {
        let p = self.p;
        let mut worst: f64 = 0.0;
        for a in &self.maps {
            for i in 0..p {
                for j in 0..p {
                    worst = worst.max((a[i * p + j] + a[j * p + i]).abs());
                }
            }
        }
        for (ia, a) in self.maps.iter().enumerate() {
            for (ib, b) in self.maps.iter().enumerate() {
                for i in 0..p {
                    for j in 0..p {
                        let mut s = 0.0;
                        for k in 0..p {
                            s += a[i * p + k] * b[k * p + j] + b[i * p + k] * a[k * p + j];
                        }
                        if ia == ib && i == j {
                            s += 2.0;
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        if self.maps.is_empty() {
            return Err(Error::Algebra("q must be at least 1".into()));
        }
        if self.maps.iter().any(|m| m.len() != self.p * self.p) {
            return Err(Error::Algebra("J-map shape does not match p".into()));
        }
        let r = self.clifford_residual();
        if r > 1e-12 {
            return Err(Error::Algebra(format!("Clifford relation residual {r:e}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DamekRicci {
    pub clifford: CliffordData,
}

impl DamekRicci {
    pub fn new(clifford: CliffordData) -> Result<Self> {
        clifford.validate()?;
        Ok(Self { clifford })
    }

    pub fn p(&self) -> usize {
        self.clifford.p
    }

    pub fn q(&self) -> usize {
        self.clifford.q()
    }
}

impl MetricFormula for DamekRicci {
    fn dim(&self) -> usize {
        self.p() + self.q() + 1
    }

    fn contains(&self, _x: &[f64]) -> bool {
        true
    }

    fn eval<T: Real>(&self, x: &[T], g: &mut [T]) {
        let (p, q) = (self.p(), self.q());
        let n = p + q + 1;
        let s = x[n - 1];
        let e1 = (-s).exp();
        let e2 = e1 * e1;
        // c[α][i] = −½ (J_α V)_i
        let mut c = vec![T::cst(0.0); q * p];
        for (al, jm) in self.clifford.maps.iter().enumerate() {
            for i in 0..p {
                let mut acc = T::cst(0.0);
                for j in 0..p {
                    let m = jm[i * p + j];
                    if m != 0.0 {
                        acc += x[j] * m;
                    }
                }
                c[al * p + i] = acc * -0.5;
            }
        }
        g.iter_mut().for_each(|v| *v = T::cst(0.0));
        for i in 0..p {
            for j in i..p {
                let mut v = if i == j { e1 } else { T::cst(0.0) };
                for al in 0..q {
                    v += e2 * c[al * p + i] * c[al * p + j];
                }
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
            for al in 0..q {
                let v = e2 * c[al * p + i];
                g[i * n + p + al] = v;
                g[(p + al) * n + i] = v;
            }
        }
        for al in 0..q {
            g[(p + al) * n + p + al] = e2;
        }
        g[(n - 1) * n + n - 1] = T::cst(1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_maps_satisfy_clifford_relations() {
        for (p, q) in [(2, 1), (4, 1), (6, 1), (4, 3), (8, 3)] {
            let c = CliffordData::shipped(p, q).unwrap();
            assert_eq!(c.q(), q);
            assert!(c.clifford_residual() <= 1e-12, "p={p} q={q}");
        }
    }

    #[test]
    fn inadmissible_data_is_rejected() {
        assert!(CliffordData::shipped(3, 1).is_err());
        assert!(CliffordData::shipped(6, 3).is_err());
        let bad = CliffordData {
            p: 2,
            maps: vec![vec![0.0, 1.0, 1.0, 0.0]],
        };
        assert!(matches!(DamekRicci::new(bad), Err(Error::Algebra(_))));
    }
}
