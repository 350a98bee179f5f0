//! Geodesic rays carrying Jacobi fields, parallel frames and a running volume integral.

use nalgebra::DMatrix;

use super::metric::ChartMetric;
use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions, OdeStats};

/// Initial data of a Jacobi field: value and covariant derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldInit {
    pub value: Vec<f64>,
    pub derivative: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct RaySpec {
    pub origin: Vec<f64>,
    pub velocity: Vec<f64>,
    pub fields: Vec<FieldInit>,
    /// Vectors parallel-transported along the ray.
    pub frame: Vec<Vec<f64>>,
    /// Also integrate `∫₀^s √det(Jᵀ g J) ds'` over the Jacobi fields.
    pub accumulate_volume: bool,
}

/// State of a ray at an output stop.
#[derive(Clone, Debug)]
pub struct RayPoint {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub g: DMatrix<f64>,
    pub fields: Vec<Vec<f64>>,
    /// Covariant derivatives `D_s J`.
    pub derivatives: Vec<Vec<f64>>,
    pub frame: Vec<Vec<f64>>,
    pub volume: f64,
}

impl RayPoint {
    /// Coordinate matrix whose columns are the Jacobi fields.
    pub fn field_matrix(&self) -> DMatrix<f64> {
        let n = self.x.len();
        DMatrix::from_fn(n, self.fields.len(), |i, a| self.fields[a][i])
    }

    pub fn derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.x.len();
        DMatrix::from_fn(n, self.derivatives.len(), |i, a| self.derivatives[a][i])
    }

    /// Gram matrix `Jᵀ g J` of the fields.
    pub fn gram(&self) -> DMatrix<f64> {
        let j = self.field_matrix();
        j.transpose() * &self.g * j
    }

    /// `√det(Jᵀ g J)`, the volume stretch of the field family.
    pub fn volume_element(&self) -> f64 {
        self.gram().determinant().max(0.0).sqrt()
    }

    /// `G⁻¹ Jᵀ g DJ`, the matrix of `J ↦ D_s J` in the field basis.
    pub fn shape_matrix(&self) -> Option<DMatrix<f64>> {
        let j = self.field_matrix();
        let b = j.transpose() * &self.g * self.derivative_matrix();
        self.gram().lu().solve(&b)
    }
}

struct Layout {
    n: usize,
    m: usize,
    f: usize,
    acc: bool,
}

impl Layout {
    fn len(&self) -> usize {
        2 * self.n + 2 * self.m * self.n + self.f * self.n + usize::from(self.acc)
    }
    fn field(&self, a: usize) -> usize {
        2 * self.n + a * self.n
    }
    fn field_dot(&self, a: usize) -> usize {
        2 * self.n + (self.m + a) * self.n
    }
    fn frame(&self, b: usize) -> usize {
        2 * self.n + 2 * self.m * self.n + b * self.n
    }
}

fn gram_det(n: usize, m: usize, g: &DMatrix<f64>, y: &[f64], lay: &Layout) -> f64 {
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut gj = vec![0.0; n];
    for b in 0..m {
        let jb = &y[lay.field(b)..lay.field(b) + n];
        for (i, gji) in gj.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..n {
                s += g[(i, k)] * jb[k];
            }
            *gji = s;
        }
        for a in 0..=b {
            let ja = &y[lay.field(a)..lay.field(a) + n];
            let v: f64 = ja.iter().zip(&gj).map(|(p, q)| p * q).sum();
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    gram.determinant()
}

/// Integrates a ray and visits it at every parameter in `stops` (monotone, same sign).
pub fn trace_ray(
    metric: &ChartMetric,
    spec: &RaySpec,
    stops: &[f64],
    opts: &OdeOptions,
    mut visit: impl FnMut(usize, &RayPoint) -> Result<()>,
) -> Result<OdeStats> {
    let n = metric.dim();
    let lay = Layout {
        n,
        m: spec.fields.len(),
        f: spec.frame.len(),
        acc: spec.accumulate_volume,
    };
    if spec.origin.len() != n || spec.velocity.len() != n {
        return Err(Error::Parameter("ray data dimension mismatch".into()));
    }
    let need_d = lay.m > 0;
    let c0 = metric.connection(&spec.origin, false)?;

    let mut y0 = vec![0.0; lay.len()];
    y0[..n].copy_from_slice(&spec.origin);
    y0[n..2 * n].copy_from_slice(&spec.velocity);
    for (a, fi) in spec.fields.iter().enumerate() {
        y0[lay.field(a)..lay.field(a) + n].copy_from_slice(&fi.value);
        // J̇ = DJ − Γ(ẋ, J).
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += c0.gamma(k, i, j) * spec.velocity[i] * fi.value[j];
                }
            }
            y0[lay.field_dot(a) + k] = fi.derivative[k] - s;
        }
    }
    for (b, e) in spec.frame.iter().enumerate() {
        y0[lay.frame(b)..lay.frame(b) + n].copy_from_slice(e);
    }

    let mut gmat = vec![0.0; n * n];
    let mut kmat = vec![0.0; n * n];
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let x = &y[..n];
        let v = &y[n..2 * n];
        let c = metric.connection(x, need_d)?;
        // G^k_j = Γ^k_ij v^i.
        for k in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += c.gamma[(k * n + i) * n + j] * v[i];
                }
                gmat[k * n + j] = s;
            }
        }
        dy[..n].copy_from_slice(v);
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += gmat[k * n + j] * v[j];
            }
            dy[n + k] = -s;
        }
        if let Some(dg) = c.dgamma.as_ref() {
            // K^k_l = ∂_l Γ^k_ij v^i v^j.
            kmat.iter_mut().for_each(|z| *z = 0.0);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let vv = v[i] * v[j];
                        if vv == 0.0 {
                            continue;
                        }
                        let base = ((k * n + i) * n + j) * n;
                        for l in 0..n {
                            kmat[k * n + l] += dg[base + l] * vv;
                        }
                    }
                }
            }
        }
        for a in 0..lay.m {
            let (jo, jdo) = (lay.field(a), lay.field_dot(a));
            for k in 0..n {
                dy[jo + k] = y[jdo + k];
                let mut s = 0.0;
                for l in 0..n {
                    s += kmat[k * n + l] * y[jo + l] + 2.0 * gmat[k * n + l] * y[jdo + l];
                }
                dy[jdo + k] = -s;
            }
        }
        for b in 0..lay.f {
            let eo = lay.frame(b);
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += gmat[k * n + j] * y[eo + j];
                }
                dy[eo + k] = -s;
            }
        }
        if lay.acc {
            let last = lay.len() - 1;
            dy[last] = gram_det(n, lay.m, &c.g, y, &lay).max(0.0).sqrt();
        }
        Ok(())
    };

    let observe = |idx: usize, s: f64, y: &[f64]| -> Result<()> {
        let x = y[..n].to_vec();
        let v = y[n..2 * n].to_vec();
        let c = metric.connection(&x, false)?;
        let fields: Vec<Vec<f64>> = (0..lay.m)
            .map(|a| y[lay.field(a)..lay.field(a) + n].to_vec())
            .collect();
        let derivatives = (0..lay.m)
            .map(|a| {
                let jd = &y[lay.field_dot(a)..lay.field_dot(a) + n];
                (0..n)
                    .map(|k| {
                        let mut s = jd[k];
                        for i in 0..n {
                            for j in 0..n {
                                s += c.gamma(k, i, j) * v[i] * fields[a][j];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let frame = (0..lay.f)
            .map(|b| y[lay.frame(b)..lay.frame(b) + n].to_vec())
            .collect();
        let volume = if lay.acc { y[lay.len() - 1] } else { 0.0 };
        visit(
            idx,
            &RayPoint {
                s,
                x,
                v,
                g: c.g,
                fields,
                derivatives,
                frame,
                volume,
            },
        )
    };

    integrate(rhs, 0.0, &y0, stops, opts, observe)
}
