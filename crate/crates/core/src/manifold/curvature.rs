use nalgebra::DMatrix;

use super::metric::{ChartMetric, Connection};
use crate::error::{Error, Result};

/// Riemann, Ricci and scalar curvature at a point.
///
/// `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l` with `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`,
/// so round spheres have positive sectional curvature.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub n: usize,
    /// `riemann[((l*n + k)*n + i)*n + j] = R^l_{kij}`.
    pub riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub g: DMatrix<f64>,
    /// Set for sampled metrics: estimated absolute error of the derivative of Γ.
    pub precision_warning: Option<f64>,
}

impl CurvatureData {
    pub fn from_connection(c: &Connection) -> Result<Self> {
        let n = c.n;
        let dgamma = c.dgamma.as_ref().ok_or_else(|| {
            Error::Unsupported("curvature needs second metric derivatives".into())
        })?;
        let gm = |k: usize, i: usize, j: usize| c.gamma[(k * n + i) * n + j];
        let dgm = |k: usize, i: usize, j: usize, l: usize| dgamma[((k * n + i) * n + j) * n + l];
        let mut riemann = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut v = dgm(l, j, k, i) - dgm(l, i, k, j);
                        for m in 0..n {
                            v += gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                        }
                        riemann[((l * n + k) * n + i) * n + j] = v;
                        riemann[((l * n + k) * n + j) * n + i] = -v;
                    }
                }
            }
        }
        let mut ricci = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += riemann[((i * n + k) * n + i) * n + j];
                }
                ricci[(j, k)] = s;
            }
        }
        // Symmetrize away rounding; exact Ricci is symmetric.
        let ricci = (&ricci + ricci.transpose()) * 0.5;
        let scalar = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| c.g_inv[(i, j)] * ricci[(i, j)])
            .sum();
        Ok(Self {
            n,
            riemann,
            ricci,
            scalar,
            g: c.g.clone(),
            precision_warning: c.fd_error,
        })
    }

    #[inline]
    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.riemann[((l * n + k) * n + i) * n + j]
    }

    /// `R(a, b)c` in coordinates.
    pub fn apply(&self, a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (l, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..n {
                if c[k] == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        s += self.riemann(l, k, i, j) * a[i] * b[j] * c[k];
                    }
                }
            }
            *o = s;
        }
        out
    }

    /// `Ric(v, v)`.
    pub fn ricci_of(&self, v: &[f64]) -> f64 {
        crate::numerics::linalg::inner(&self.ricci, v, v)
    }

    /// Max over index triples of `|R^l_{kij} + R^l_{ijk} + R^l_{jki}|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = self.riemann(l, k, i, j)
                            + self.riemann(l, i, j, k)
                            + self.riemann(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Eigenvalues of the Ricci endomorphism `g⁻¹ Ric`, ascending.
    pub fn ricci_eigenvalues(&self) -> Vec<f64> {
        let chol = self.g.clone().cholesky().expect("metric positive definite");
        let l_inv = chol.l().try_inverse().expect("invertible Cholesky factor");
        let sym = &l_inv * &self.ricci * l_inv.transpose();
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Curvature tensors of `metric` at `x`.
pub fn curvature(metric: &ChartMetric, x: &[f64]) -> Result<CurvatureData> {
    CurvatureData::from_connection(&metric.connection(x, true)?)
}
