use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manifold::{trace_ray, ChartMetric, RaySpec};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::linalg::{complete_basis, inner, orthonormalize};
use crate::numerics::ode::{integrate, OdeOptions};

type CurveFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// Unit-speed geodesic from `point` along `direction`.
    Geodesic {
        point: Vec<f64>,
        direction: Vec<f64>,
    },
    /// Explicit coordinate curve with its first two derivatives.
    Coordinates {
        point: CurveFn,
        velocity: CurveFn,
        acceleration: CurveFn,
    },
}

/// A curve `γ: [t0, t1] → M` with a Fermi frame of its normal bundle.
#[derive(Clone)]
pub struct FramedCurve {
    kind: Kind,
    t0: f64,
    t1: f64,
}

impl std::fmt::Debug for FramedCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::Geodesic { point, direction } => f
                .debug_struct("FramedCurve::Geodesic")
                .field("point", point)
                .field("direction", direction)
                .field("length", &(self.t1 - self.t0))
                .finish(),
            Kind::Coordinates { .. } => f
                .debug_struct("FramedCurve::Coordinates")
                .field("t0", &self.t0)
                .field("t1", &self.t1)
                .finish(),
        }
    }
}

/// Curve data at one parameter value.
#[derive(Clone, Debug)]
pub struct CurveSample {
    pub t: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// `κ = D_t γ′`.
    pub curvature: Vec<f64>,
    /// Orthonormal normal frame `ν₁ … ν_{n−1}`, parallel for the normal connection.
    pub normals: Vec<Vec<f64>>,
    pub g: DMatrix<f64>,
}

impl FramedCurve {
    /// Unit-speed geodesic segment of the given length; `direction` is normalized.
    pub fn geodesic(
        metric: &ChartMetric,
        point: &[f64],
        direction: &[f64],
        length: f64,
    ) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Parameter("curve length must be positive".into()));
        }
        let nv = metric.norm(point, direction)?;
        if !(nv > 0.0) {
            return Err(Error::Parameter(
                "geodesic direction must be nonzero".into(),
            ));
        }
        let direction = direction.iter().map(|c| c / nv).collect();
        Ok(Self {
            kind: Kind::Geodesic {
                point: point.to_vec(),
                direction,
            },
            t0: 0.0,
            t1: length,
        })
    }

    pub fn from_coordinates(
        point: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        velocity: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        acceleration: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        t0: f64,
        t1: f64,
    ) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::Parameter("curve interval must be nonempty".into()));
        }
        Ok(Self {
            kind: Kind::Coordinates {
                point: Arc::new(point),
                velocity: Arc::new(velocity),
                acceleration: Arc::new(acceleration),
            },
            t0,
            t1,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn is_geodesic(&self) -> bool {
        matches!(self.kind, Kind::Geodesic { .. })
    }

    /// Arc length `l_γ`; exact for geodesics, 64-point Gauss–Legendre otherwise.
    pub fn length(&self, metric: &ChartMetric) -> Result<f64> {
        match &self.kind {
            Kind::Geodesic { .. } => Ok(self.t1 - self.t0),
            Kind::Coordinates {
                point, velocity, ..
            } => {
                let half = 0.5 * (self.t1 - self.t0);
                let mid = 0.5 * (self.t1 + self.t0);
                let mut s = 0.0;
                for (x, w) in gauss_legendre(64) {
                    let t = mid + half * x;
                    s += w * half * metric.norm(&point(t), &velocity(t))?;
                }
                Ok(s)
            }
        }
    }

    /// Curve data and Fermi frame at increasing parameters inside `[t0, t1]`.
    pub fn samples(
        &self,
        metric: &ChartMetric,
        ts: &[f64],
        ode: &OdeOptions,
    ) -> Result<Vec<CurveSample>> {
        if ts.windows(2).any(|w| w[1] < w[0])
            || ts.first().is_some_and(|t| *t < self.t0)
            || ts.last().is_some_and(|t| *t > self.t1)
        {
            return Err(Error::Parameter(
                "curve samples must be increasing and inside the interval".into(),
            ));
        }
        let n = metric.dim();
        let mut out = Vec::with_capacity(ts.len());
        match &self.kind {
            Kind::Geodesic { point, direction } => {
                let g0 = metric.metric(point)?;
                let normals = complete_basis(&g0, &[direction.clone()])[1..].to_vec();
                let spec = RaySpec {
                    origin: point.clone(),
                    velocity: direction.clone(),
                    fields: vec![],
                    frame: normals,
                    accumulate_volume: false,
                };
                trace_ray(metric, &spec, ts, ode, |_, pt| {
                    let mut normals = pt.frame.clone();
                    tidy_normals(&pt.g, &pt.v, &mut normals);
                    out.push(CurveSample {
                        t: pt.s,
                        position: pt.x.clone(),
                        velocity: pt.v.clone(),
                        curvature: vec![0.0; n],
                        normals,
                        g: pt.g.clone(),
                    });
                    Ok(())
                })?;
            }
            Kind::Coordinates {
                point,
                velocity,
                acceleration,
            } => {
                let x0 = point(self.t0);
                let g0 = metric.metric(&x0)?;
                let normals0 = complete_basis(&g0, &[velocity(self.t0)])[1..].to_vec();
                let y0: Vec<f64> = normals0.concat();
                let m = n - 1;
                let kappa = |t: f64| -> Result<(
                    Vec<f64>,
                    Vec<f64>,
                    Vec<f64>,
                    crate::manifold::Connection,
                )> {
                    let x = point(t);
                    let v = velocity(t);
                    let a = acceleration(t);
                    let c = metric.connection(&x, false)?;
                    let k = (0..n)
                        .map(|k| {
                            let mut s = a[k];
                            for i in 0..n {
                                for j in 0..n {
                                    s += c.gamma(k, i, j) * v[i] * v[j];
                                }
                            }
                            s
                        })
                        .collect();
                    Ok((x, v, k, c))
                };
                let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
                    let (_, v, k, c) = kappa(t)?;
                    let vv = inner(&c.g, &v, &v);
                    for b in 0..m {
                        let nu = &y[b * n..(b + 1) * n];
                        let proj = inner(&c.g, nu, &k) / vv;
                        for kk in 0..n {
                            let mut s = 0.0;
                            for i in 0..n {
                                for j in 0..n {
                                    s += c.gamma(kk, i, j) * v[i] * nu[j];
                                }
                            }
                            dy[b * n + kk] = -s - proj * v[kk];
                        }
                    }
                    Ok(())
                };
                integrate(rhs, self.t0, &y0, ts, ode, |_, t, y| {
                    let (x, v, k, c) = kappa(t)?;
                    let mut normals: Vec<Vec<f64>> =
                        (0..m).map(|b| y[b * n..(b + 1) * n].to_vec()).collect();
                    tidy_normals(&c.g, &v, &mut normals);
                    out.push(CurveSample {
                        t,
                        position: x,
                        velocity: v,
                        curvature: k,
                        normals,
                        g: c.g,
                    });
                    Ok(())
                })?;
            }
        }
        Ok(out)
    }
}

/// Removes drift off the normal bundle and re-orthonormalizes in a fixed order.
fn tidy_normals(g: &DMatrix<f64>, v: &[f64], normals: &mut [Vec<f64>]) {
    let vv = inner(g, v, v);
    for nu in normals.iter_mut() {
        let c = inner(g, nu, v) / vv;
        for (a, b) in nu.iter_mut().zip(v) {
            *a -= c * b;
        }
    }
    orthonormalize(g, normals);
}
