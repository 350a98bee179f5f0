use super::metric::ChartMetric;
use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};

/// Position and velocity of a geodesic at parameter `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub t: f64,
}

/// Geodesic spray `ẍ^k = −Γ^k_ij ẋ^i ẋ^j` on the state `(x, ẋ)`.
pub(crate) fn geodesic_rhs(metric: &ChartMetric, y: &[f64], dy: &mut [f64]) -> Result<()> {
    let n = metric.dim();
    let (x, v) = y.split_at(n);
    let c = metric.connection(x, false)?;
    dy[..n].copy_from_slice(v);
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += c.gamma[(k * n + i) * n + j] * v[i] * v[j];
            }
        }
        dy[n + k] = -s;
    }
    Ok(())
}

/// Solves the geodesic equation from `(p, v)` and reports the state at every stop.
pub fn integrate_geodesic_with(
    metric: &ChartMetric,
    p: &[f64],
    v: &[f64],
    stops: &[f64],
    opts: &OdeOptions,
    mut visit: impl FnMut(GeodesicState) -> Result<()>,
) -> Result<()> {
    let n = metric.dim();
    if p.len() != n || v.len() != n {
        return Err(Error::Parameter("geodesic data dimension mismatch".into()));
    }
    if !metric.contains(p) {
        return Err(Error::Domain { point: p.to_vec() });
    }
    let mut y0 = p.to_vec();
    y0.extend_from_slice(v);
    integrate(
        |_t, y, dy| geodesic_rhs(metric, y, dy),
        0.0,
        &y0,
        stops,
        opts,
        |_, t, y| {
            visit(GeodesicState {
                position: y[..n].to_vec(),
                velocity: y[n..].to_vec(),
                t,
            })
        },
    )?;
    Ok(())
}

/// `γ_v(t)` and `γ_v'(t)` for the geodesic with `γ(0) = p`, `γ'(0) = v`.
pub fn integrate_geodesic(
    metric: &ChartMetric,
    p: &[f64],
    v: &[f64],
    t: f64,
) -> Result<GeodesicState> {
    if v.iter().all(|c| *c == 0.0) {
        return Err(Error::Parameter(
            "geodesic needs a nonzero initial velocity".into(),
        ));
    }
    let mut out = None;
    integrate_geodesic_with(metric, p, v, &[t], &OdeOptions::default(), |s| {
        out = Some(s);
        Ok(())
    })?;
    out.ok_or(Error::Escape { t: 0.0 })
}

/// A coordinate curve with its velocity, parametrized on `[t0, t1]`.
pub struct CoordinateCurve<'a> {
    pub point: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync + 'a>,
    pub velocity: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync + 'a>,
    pub t0: f64,
    pub t1: f64,
}

/// Parallel transport of `w` from `curve(t0)` to `curve(t1)`: `ẇ^k = −Γ^k_ij ẋ^i w^j`.
pub fn parallel_transport(
    metric: &ChartMetric,
    curve: &CoordinateCurve<'_>,
    w: &[f64],
) -> Result<Vec<f64>> {
    let n = metric.dim();
    let mut out = w.to_vec();
    integrate(
        |t, y, dy| {
            let x = (curve.point)(t);
            let xd = (curve.velocity)(t);
            let c = metric.connection(&x, false)?;
            for k in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += c.gamma[(k * n + i) * n + j] * xd[i] * y[j];
                    }
                }
                dy[k] = -s;
            }
            Ok(())
        },
        curve.t0,
        w,
        &[curve.t1],
        &OdeOptions::default(),
        |_, _, y| {
            out.copy_from_slice(y);
            Ok(())
        },
    )?;
    Ok(out)
}
