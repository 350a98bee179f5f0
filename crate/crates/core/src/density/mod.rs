//! Jacobi fields along unit-speed geodesics and the quantities built from them:
//! the volume density `θ`, the geodesic involution, mean curvature of geodesic
//! spheres, ball volumes and D'Atri checks.
//!
//! For a unit vector `u ∈ T_pM` with orthonormal frame `e₁ = u, e₂, …, eₙ`, the
//! normal Jacobi fields `J_i(0) = 0`, `J_i'(0) = e_i` (`i ≥ 2`) are propagated
//! together with the parallel frame `E_k`. Then `A(r)_{ki} = ⟨E_k, J_i⟩`,
//! `det A(r) = r^{n−1} θ(ru)` and the shape operator of the geodesic sphere is
//! `L = −A′A⁻¹`.

mod volumes;

use nalgebra::DMatrix;

pub use volumes::{
    ball_volumes, ball_volumes_with, datri_checks, BallVolumes, DatriReport, DatriSample,
};

use crate::error::{Error, Result};
use crate::manifold::{curvature, trace_ray, ChartMetric, FieldInit, RaySpec, TangentVector};
use crate::numerics::fd::d1_five_point;
use crate::numerics::linalg::{complete_basis, inner};
use crate::numerics::OdeOptions;

/// Relative conjugate-point guard on `det A(r) / r^{n−1}`.
pub const CONJUGATE_GUARD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct TransportOptions {
    pub ode: OdeOptions,
    /// Also propagate the radial field `J₁ = r γ′` for the full `n×n` block.
    pub full_block: bool,
    /// Evaluate `R(r)_{ij} = ⟨R(E_i, γ′)γ′, E_j⟩` at each sample.
    pub curvature: bool,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            full_block: false,
            curvature: false,
        }
    }
}

/// Jacobi data at one radius.
#[derive(Clone, Debug)]
pub struct JacobiSample {
    pub r: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Normal block, `(n−1)×(n−1)`.
    pub a: DMatrix<f64>,
    pub a_prime: DMatrix<f64>,
    pub curvature: Option<DMatrix<f64>>,
    /// `(A, A′)` over all `n` frame directions.
    pub full: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl JacobiSample {
    /// `det A(r) / r^{n−1}`.
    pub fn theta(&self) -> f64 {
        self.a.determinant() / self.r.powi(self.a.nrows() as i32)
    }

    /// `tr(L) = −tr(A′A⁻¹)`.
    pub fn mean_curvature(&self) -> Result<f64> {
        let inv = self
            .a
            .clone()
            .try_inverse()
            .ok_or(Error::ConjugatePoint { radius: self.r })?;
        Ok(-(&self.a_prime * inv).trace())
    }

    /// `max |A′ᵀA − AᵀA′|`.
    pub fn wronskian_defect(&self) -> f64 {
        let w = self.a_prime.transpose() * &self.a - self.a.transpose() * &self.a_prime;
        w.amax()
    }
}

#[derive(Clone, Debug)]
pub struct JacobiTransport {
    pub origin: Vec<f64>,
    /// Orthonormal frame at the origin, `frame[0] = u`.
    pub frame: Vec<Vec<f64>>,
    pub samples: Vec<JacobiSample>,
}

/// `g`-orthonormal frame at `p` whose first vector is the unit vector along `u`.
pub(crate) fn frame_at(metric: &ChartMetric, p: &[f64], u: &[f64]) -> Result<Vec<Vec<f64>>> {
    let g = metric.metric(p)?;
    let nu = inner(&g, u, u).sqrt();
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Parameter("direction must be nonzero".into()));
    }
    let unit: Vec<f64> = u.iter().map(|c| c / nu).collect();
    Ok(complete_basis(&g, &[unit]))
}

/// Propagates the Jacobi matrix along `γ_u` and samples it at `radii` (positive, increasing).
pub fn jacobi_transport_with(
    metric: &ChartMetric,
    u: &TangentVector,
    radii: &[f64],
    opts: &TransportOptions,
) -> Result<JacobiTransport> {
    if (u.norm - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "direction has norm {} instead of 1",
            u.norm
        )));
    }
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter(
            "radii must be positive and increasing".into(),
        ));
    }
    let n = metric.dim();
    let frame = frame_at(metric, &u.point, &u.components)?;
    let first = usize::from(!opts.full_block);
    let fields = frame[first..]
        .iter()
        .map(|e| FieldInit {
            value: vec![0.0; n],
            derivative: e.clone(),
        })
        .collect();
    let spec = RaySpec {
        origin: u.point.clone(),
        velocity: frame[0].clone(),
        fields,
        frame: frame.clone(),
        accumulate_volume: false,
    };
    let mut samples = Vec::with_capacity(radii.len());
    trace_ray(metric, &spec, radii, &opts.ode, |_, pt| {
        let m = pt.fields.len();
        let a_all = DMatrix::from_fn(n, m, |k, i| inner(&pt.g, &pt.frame[k], &pt.fields[i]));
        let ap_all = DMatrix::from_fn(n, m, |k, i| inner(&pt.g, &pt.frame[k], &pt.derivatives[i]));
        let (a, a_prime, full) = if opts.full_block {
            let a = a_all.view((1, 1), (n - 1, n - 1)).into_owned();
            let ap = ap_all.view((1, 1), (n - 1, n - 1)).into_owned();
            (a, ap, Some((a_all, ap_all)))
        } else {
            (
                a_all.rows(1, n - 1).into_owned(),
                ap_all.rows(1, n - 1).into_owned(),
                None,
            )
        };
        let det = a.determinant();
        if det < CONJUGATE_GUARD * pt.s.powi(n as i32 - 1) {
            return Err(Error::ConjugatePoint { radius: pt.s });
        }
        let curvature = if opts.curvature {
            let cd = curvature(metric, &pt.x)?;
            Some(DMatrix::from_fn(n - 1, n - 1, |i, j| {
                let rv = cd.apply(&pt.frame[i + 1], &pt.v, &pt.v);
                inner(&pt.g, &rv, &pt.frame[j + 1])
            }))
        } else {
            None
        };
        samples.push(JacobiSample {
            r: pt.s,
            position: pt.x.clone(),
            velocity: pt.v.clone(),
            a,
            a_prime,
            curvature,
            full,
        });
        Ok(())
    })?;
    Ok(JacobiTransport {
        origin: u.point.clone(),
        frame,
        samples,
    })
}

/// [`jacobi_transport_with`] at `samples` equally spaced radii up to `r_max`, with curvature.
pub fn jacobi_transport(
    metric: &ChartMetric,
    u: &TangentVector,
    r_max: f64,
    samples: usize,
) -> Result<JacobiTransport> {
    if samples == 0 || !(r_max > 0.0) {
        return Err(Error::Parameter(
            "need a positive radius and at least one sample".into(),
        ));
    }
    let radii: Vec<f64> = (1..=samples)
        .map(|k| r_max * k as f64 / samples as f64)
        .collect();
    let opts = TransportOptions {
        curvature: metric.curvature_available(),
        ..Default::default()
    };
    jacobi_transport_with(metric, u, &radii, &opts)
}

/// `θ` along `u` at several radii.
pub fn theta_profile(
    metric: &ChartMetric,
    u: &TangentVector,
    radii: &[f64],
    ode: &OdeOptions,
) -> Result<Vec<f64>> {
    let opts = TransportOptions {
        ode: ode.clone(),
        ..Default::default()
    };
    Ok(jacobi_transport_with(metric, u, radii, &opts)?
        .samples
        .iter()
        .map(JacobiSample::theta)
        .collect())
}

pub fn theta_with(metric: &ChartMetric, v: &TangentVector, ode: &OdeOptions) -> Result<f64> {
    if v.norm == 0.0 {
        return Ok(1.0);
    }
    Ok(theta_profile(metric, &v.unit()?, &[v.norm], ode)?[0])
}

/// Volume density `θ(v) = det A(‖v‖) / ‖v‖^{n−1}`.
pub fn theta(metric: &ChartMetric, v: &TangentVector) -> Result<f64> {
    theta_with(metric, v, &OdeOptions::default())
}

/// `ι(v) = −γ_v′(1)`, based at `exp(v)`.
pub fn geodesic_involution_with(
    metric: &ChartMetric,
    v: &TangentVector,
    ode: &OdeOptions,
) -> Result<TangentVector> {
    if v.norm == 0.0 {
        return Ok(v.clone());
    }
    let mut end = None;
    crate::manifold::integrate_geodesic_with(metric, &v.point, &v.components, &[1.0], ode, |s| {
        end = Some(s);
        Ok(())
    })?;
    let end = end.ok_or(Error::Escape { t: 0.0 })?;
    let back: Vec<f64> = end.velocity.iter().map(|c| -c).collect();
    TangentVector::new(metric, &end.position, &back)
}

pub fn geodesic_involution(metric: &ChartMetric, v: &TangentVector) -> Result<TangentVector> {
    geodesic_involution_with(metric, v, &OdeOptions::default())
}

/// Mean curvature of the geodesic sphere through `exp(v)` by two routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCurvature {
    /// `−tr(A′A⁻¹)`.
    pub trace_form: f64,
    /// `−(n−1)/r − ∂_rθ/θ` with a five-point radial difference.
    pub radial_form: f64,
}

/// Relative step of the radial difference in [`mean_curvature_forms`].
pub const RADIAL_STEP: f64 = 1e-3;

pub fn mean_curvature_forms(metric: &ChartMetric, v: &TangentVector) -> Result<MeanCurvature> {
    let u = v.unit()?;
    let r = v.norm;
    let h = RADIAL_STEP * r;
    let radii = [r - 2.0 * h, r - h, r, r + h, r + 2.0 * h];
    let tr = jacobi_transport_with(metric, &u, &radii, &TransportOptions::default())?;
    let th: Vec<f64> = tr.samples.iter().map(JacobiSample::theta).collect();
    let dth = d1_five_point(th[0], th[1], th[3], th[4], h);
    let n1 = (metric.dim() - 1) as f64;
    Ok(MeanCurvature {
        trace_form: tr.samples[2].mean_curvature()?,
        radial_form: -n1 / r - dth / th[2],
    })
}

/// `h(v) = −tr(A′A⁻¹)` at `r = ‖v‖`.
pub fn sphere_mean_curvature(metric: &ChartMetric, v: &TangentVector) -> Result<f64> {
    let u = v.unit()?;
    jacobi_transport_with(metric, &u, &[v.norm], &TransportOptions::default())?.samples[0]
        .mean_curvature()
}
