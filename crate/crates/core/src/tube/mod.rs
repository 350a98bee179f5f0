//! Tubes about curves: direct volumes and curvature integrals of tubular
//! hypersurfaces by normal-exponential Jacobi fields, harmonic closed forms,
//! and Steiner consistency.
//!
//! A point of the tube is `Φ(t, w, s) = exp_{γ(t)}(s N₀)` with
//! `N₀ = Σ w_k ν_k(t)` and `w ∈ 𝕊^{n−2}`. Along the ray the `t`-variation
//! field starts at `γ′(t)` with derivative `D_t N₀ = −⟨N₀, κ⟩γ′/|γ′|²`; the
//! angular fields start at `0` with derivatives spanning `N₀^⊥` in the normal
//! space. The Gram determinant of these `n−1` fields is the volume element of
//! the parallel hypersurface.

mod curve;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use curve::{CurveSample, FramedCurve};

use crate::error::{Error, Result};
use crate::manifold::{curvature, trace_ray, ChartMetric, FieldInit, RaySpec};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::linalg::{complete_basis, inner};
use crate::numerics::par::par_try_map;
use crate::numerics::{pairwise_sum, unit_ball_volume, OdeOptions};
use crate::spaces::RadialProfile;
use crate::sphere::{build_rule, RuleKind, SphereRule};

/// Relative guard on the tube volume element, `√det G < guard · s^{n−2}|γ′|`.
pub const SELF_FOCUS_GUARD: f64 = 1e-10;

/// Quadrature layout over `t` and the normal directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeQuadrature {
    pub t_panels: usize,
    pub t_order: usize,
    pub angular_level: usize,
    pub angular_kind: RuleKind,
    pub rtol: f64,
    /// Also integrate with the next-coarser angular rule for an error estimate.
    pub estimate_error: bool,
}

impl Default for TubeQuadrature {
    fn default() -> Self {
        Self {
            t_panels: 1,
            t_order: 16,
            angular_level: 6,
            angular_kind: RuleKind::Product,
            rtol: 1e-10,
            estimate_error: true,
        }
    }
}

impl TubeQuadrature {
    fn ode(&self) -> OdeOptions {
        OdeOptions::default().with_rtol(self.rtol)
    }

    fn t_nodes(&self, t0: f64, t1: f64) -> Result<Vec<(f64, f64)>> {
        if self.t_panels == 0 || self.t_order == 0 {
            return Err(Error::Parameter(
                "tube quadrature needs at least one panel and node".into(),
            ));
        }
        let rule = gauss_legendre(self.t_order);
        let width = (t1 - t0) / self.t_panels as f64;
        let mut out = Vec::with_capacity(self.t_panels * self.t_order);
        for p in 0..self.t_panels {
            let mid = t0 + (p as f64 + 0.5) * width;
            out.extend(
                rule.iter()
                    .map(|(x, w)| (mid + 0.5 * width * x, 0.5 * width * w)),
            );
        }
        Ok(out)
    }
}

/// Jacobian data of the normal exponential at one point of the tube.
#[derive(Clone, Debug)]
pub struct TubeJacobian {
    /// `√det` of the Gram matrix of the `t`- and angular Jacobi fields.
    pub factor: f64,
    /// Shape operator of `𝒫(γ, ρ)` in the field basis, with the sign making
    /// Euclidean cylinders have eigenvalue `−1/ρ`.
    pub shape: DMatrix<f64>,
    /// Outward unit normal `N = γ_w′(ρ)`.
    pub normal: Vec<f64>,
    pub position: Vec<f64>,
}

fn ray_spec(cs: &CurveSample, w: &[f64]) -> RaySpec {
    let n = cs.position.len();
    let m = n - 1;
    let mut n0 = vec![0.0; n];
    for (wk, nu) in w.iter().zip(&cs.normals) {
        for (a, b) in n0.iter_mut().zip(nu) {
            *a += wk * b;
        }
    }
    let vv = inner(&cs.g, &cs.velocity, &cs.velocity);
    let tilt = inner(&cs.g, &n0, &cs.curvature) / vv;
    let mut fields = vec![FieldInit {
        value: cs.velocity.clone(),
        derivative: cs.velocity.iter().map(|v| -tilt * v).collect(),
    }];
    let angular = complete_basis(&DMatrix::identity(m, m), &[w.to_vec()]);
    for f in &angular[1..] {
        let mut d = vec![0.0; n];
        for (fk, nu) in f.iter().zip(&cs.normals) {
            for (a, b) in d.iter_mut().zip(nu) {
                *a += fk * b;
            }
        }
        fields.push(FieldInit {
            value: vec![0.0; n],
            derivative: d,
        });
    }
    RaySpec {
        origin: cs.position.clone(),
        velocity: n0,
        fields,
        frame: vec![],
        accumulate_volume: true,
    }
}

fn check_focus(el: f64, s: f64, speed: f64, n: usize, t: f64) -> Result<()> {
    if el < SELF_FOCUS_GUARD * s.powi(n as i32 - 2) * speed {
        return Err(Error::SelfFocus { t, rho: s });
    }
    Ok(())
}

/// Jacobian, shape operator and outward normal at `Φ(t, w, ρ)`; `w` holds Fermi-frame components.
pub fn tube_jacobian(
    metric: &ChartMetric,
    fc: &FramedCurve,
    t: f64,
    w: &[f64],
    rho: f64,
) -> Result<TubeJacobian> {
    let n = metric.dim();
    if w.len() != n - 1 {
        return Err(Error::Parameter(
            "normal direction needs n−1 components".into(),
        ));
    }
    if !(rho > 0.0) {
        return Err(Error::Parameter("radius must be positive".into()));
    }
    let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w: Vec<f64> = w.iter().map(|x| x / nw).collect();
    let ode = OdeOptions::default();
    let cs = fc.samples(metric, &[t], &ode)?.remove(0);
    let speed = inner(&cs.g, &cs.velocity, &cs.velocity).sqrt();
    let mut out = None;
    trace_ray(metric, &ray_spec(&cs, &w), &[rho], &ode, |_, pt| {
        let factor = pt.volume_element();
        check_focus(factor, rho, speed, n, t)?;
        let m = pt.shape_matrix().ok_or(Error::SelfFocus { t, rho })?;
        out = Some(TubeJacobian {
            factor,
            shape: -m,
            normal: pt.v.clone(),
            position: pt.x.clone(),
        });
        Ok(())
    })?;
    out.ok_or(Error::Escape { t: 0.0 })
}

/// Integrals gathered over the tube at one evaluation radius.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TubeInvariants {
    pub radius: f64,
    pub length: f64,
    /// `V_γ(r)`.
    pub volume: f64,
    /// `A_γ(r)`.
    pub area: f64,
    /// `H_γ(r) = (1/(n−1)) ∫ μ^P`.
    pub total_mean_curvature: f64,
    /// `C_γ(r) = ∫ τ^P`.
    pub total_scalar_curvature: f64,
    /// `∫ ρ(N)`.
    pub normal_ricci: f64,
    /// `∫ τ` over the tubular hypersurface.
    pub ambient_scalar: f64,
    pub errors: InvariantErrors,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantErrors {
    pub volume: f64,
    pub area: f64,
    pub total_mean_curvature: f64,
    pub total_scalar_curvature: f64,
    pub normal_ricci: f64,
}

/// Per-ray values at the stops.
#[derive(Clone, Debug)]
struct RayValues {
    volume: Vec<f64>,
    area: Vec<f64>,
    /// `(−tr S, tr S² , Ric(N,N), τ)` at the evaluation stop, weighted by the area element.
    curv: Option<[f64; 4]>,
}

#[derive(Clone, Debug)]
struct Sums {
    volume: Vec<f64>,
    area: Vec<f64>,
    /// `∫ tr M`, `∫ (tr M)² − tr M²`, `∫ Ric(N,N)`, `∫ τ` with `M = −S`.
    curv: [f64; 4],
    /// Per-`t`-node angular integrals of the volume at the last stop.
    t_profile: Vec<f64>,
}

fn sweep(
    metric: &ChartMetric,
    samples: &[CurveSample],
    t_weights: &[f64],
    rule: &SphereRule,
    stops: &[f64],
    eval_stop: Option<usize>,
    ode: &OdeOptions,
) -> Result<Sums> {
    let n = metric.dim();
    let m = rule.len();
    let rays: Vec<RayValues> = par_try_map(samples.len() * m, |job| {
        let (i, j) = (job / m, job % m);
        let cs = &samples[i];
        let speed = inner(&cs.g, &cs.velocity, &cs.velocity).sqrt();
        let mut vals = RayValues {
            volume: Vec::with_capacity(stops.len()),
            area: Vec::with_capacity(stops.len()),
            curv: None,
        };
        trace_ray(metric, &ray_spec(cs, rule.node(j)), stops, ode, |k, pt| {
            let el = pt.volume_element();
            check_focus(el, pt.s, speed, n, cs.t)?;
            vals.volume.push(pt.volume);
            vals.area.push(el);
            if eval_stop == Some(k) {
                let m = pt
                    .shape_matrix()
                    .ok_or(Error::SelfFocus { t: cs.t, rho: pt.s })?;
                let tr = m.trace();
                let tr2 = (&m * &m).trace();
                let cd = curvature(metric, &pt.x)?;
                let ric = cd.ricci_of(&pt.v) / inner(&pt.g, &pt.v, &pt.v);
                vals.curv = Some([tr * el, (tr * tr - tr2) * el, ric * el, cd.scalar * el]);
            }
            Ok(())
        })?;
        Ok(vals)
    })?;

    let k = stops.len();
    let mut per_t_vol = vec![Vec::with_capacity(samples.len()); k];
    let mut per_t_area = vec![Vec::with_capacity(samples.len()); k];
    let mut per_t_curv = vec![Vec::with_capacity(samples.len()); 4];
    let mut t_profile = Vec::with_capacity(samples.len());
    for (i, tw) in t_weights.iter().enumerate() {
        let block = &rays[i * rule.len()..(i + 1) * rule.len()];
        for s in 0..k {
            let v: Vec<f64> = block
                .iter()
                .zip(rule.weights())
                .map(|(r, w)| w * r.volume[s])
                .collect();
            let a: Vec<f64> = block
                .iter()
                .zip(rule.weights())
                .map(|(r, w)| w * r.area[s])
                .collect();
            let vs = pairwise_sum(&v);
            if s + 1 == k {
                t_profile.push(vs);
            }
            per_t_vol[s].push(tw * vs);
            per_t_area[s].push(tw * pairwise_sum(&a));
        }
        if eval_stop.is_some() {
            for (c, acc) in per_t_curv.iter_mut().enumerate() {
                let v: Vec<f64> = block
                    .iter()
                    .zip(rule.weights())
                    .map(|(r, w)| w * r.curv.expect("evaluation stop visited")[c])
                    .collect();
                acc.push(tw * pairwise_sum(&v));
            }
        }
    }
    let curv = if eval_stop.is_some() {
        [
            pairwise_sum(&per_t_curv[0]),
            pairwise_sum(&per_t_curv[1]),
            pairwise_sum(&per_t_curv[2]),
            pairwise_sum(&per_t_curv[3]),
        ]
    } else {
        [0.0; 4]
    };
    Ok(Sums {
        volume: per_t_vol.iter().map(|v| pairwise_sum(v)).collect(),
        area: per_t_area.iter().map(|v| pairwise_sum(v)).collect(),
        curv,
        t_profile,
    })
}

/// Tail estimate of a Gauss–Legendre panel sum from its two highest Legendre coefficients.
fn legendre_tail(values: &[f64], nodes: &[(f64, f64)], panels: usize) -> f64 {
    let k = values.len() / panels;
    if k < 3 {
        return 0.0;
    }
    let unit = gauss_legendre(k);
    let mut tail = 0.0;
    for p in 0..panels {
        let f = &values[p * k..(p + 1) * k];
        let half: f64 = nodes[p * k..(p + 1) * k]
            .iter()
            .map(|(_, w)| w)
            .sum::<f64>()
            / 2.0;
        let coeff = |deg: usize| -> f64 {
            let mut s = 0.0;
            for ((x, w), fi) in unit.iter().zip(f) {
                // P_deg(x) by the three-term recurrence.
                let (mut p0, mut p1) = (1.0, *x);
                let pd = if deg == 0 {
                    1.0
                } else {
                    for j in 1..deg {
                        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    p1
                };
                s += w * fi * pd;
            }
            s * (2 * deg + 1) as f64 / 2.0
        };
        tail += 2.0 * half * (coeff(k - 1).abs() + coeff(k - 2).abs());
    }
    tail
}

struct Layout {
    samples: Vec<CurveSample>,
    t_weights: Vec<f64>,
    t_nodes: Vec<(f64, f64)>,
    rule: SphereRule,
    coarse: Option<SphereRule>,
    ode: OdeOptions,
    length: f64,
}

fn layout(metric: &ChartMetric, fc: &FramedCurve, quad: &TubeQuadrature) -> Result<Layout> {
    let n = metric.dim();
    let (t0, t1) = fc.interval();
    let t_nodes = quad.t_nodes(t0, t1)?;
    let ts: Vec<f64> = t_nodes.iter().map(|p| p.0).collect();
    let ode = quad.ode();
    let samples = fc.samples(metric, &ts, &ode)?;
    let rule = build_rule(n - 1, quad.angular_level, quad.angular_kind)?;
    let coarse = if quad.estimate_error {
        rule.coarser()?
    } else {
        None
    };
    Ok(Layout {
        samples,
        t_weights: t_nodes.iter().map(|p| p.1).collect(),
        t_nodes,
        rule,
        coarse,
        ode,
        length: fc.length(metric)?,
    })
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Parameter("tube radius must be positive".into()));
    }
    Ok(())
}

/// Volume with error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeVolume {
    pub value: f64,
    pub error: f64,
}

fn volume_error(
    lay: &Layout,
    fine: &Sums,
    coarse: Option<&Sums>,
    quad: &TubeQuadrature,
    idx: usize,
) -> f64 {
    let v = fine.volume[idx];
    let ang = coarse.map_or(0.0, |c| (c.volume[idx] - v).abs());
    let tail = legendre_tail(&fine.t_profile, &lay.t_nodes, quad.t_panels);
    ang + tail + 10.0 * lay.ode.rtol * v.abs() + 1e2 * f64::EPSILON * v.abs()
}

/// Tube volumes `V_γ(r)` for several radii from one set of rays.
pub fn tube_volumes(
    metric: &ChartMetric,
    fc: &FramedCurve,
    radii: &[f64],
    quad: &TubeQuadrature,
) -> Result<Vec<TubeVolume>> {
    radii.iter().try_for_each(|r| check_radius(*r))?;
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("radii must be increasing".into()));
    }
    let lay = layout(metric, fc, quad)?;
    let fine = sweep(
        metric,
        &lay.samples,
        &lay.t_weights,
        &lay.rule,
        radii,
        None,
        &lay.ode,
    )?;
    let coarse = match &lay.coarse {
        Some(c) => Some(sweep(
            metric,
            &lay.samples,
            &lay.t_weights,
            c,
            radii,
            None,
            &lay.ode,
        )?),
        None => None,
    };
    Ok((0..radii.len())
        .map(|k| {
            let err = if k + 1 == radii.len() {
                volume_error(&lay, &fine, coarse.as_ref(), quad, k)
            } else {
                let ang = coarse
                    .as_ref()
                    .map_or(0.0, |c| (c.volume[k] - fine.volume[k]).abs());
                ang + 10.0 * lay.ode.rtol * fine.volume[k].abs()
                    + 1e2 * f64::EPSILON * fine.volume[k].abs()
            };
            TubeVolume {
                value: fine.volume[k],
                error: err,
            }
        })
        .collect())
}

/// `V_γ(r)` by integrating the normal-exponential Jacobian over `[t0,t1] × 𝕊^{n−2} × [0, r]`.
pub fn tube_volume_direct(
    metric: &ChartMetric,
    fc: &FramedCurve,
    r: f64,
    quad: &TubeQuadrature,
) -> Result<TubeVolume> {
    Ok(tube_volumes(metric, fc, &[r], quad)?[0])
}

fn invariants_from(r: f64, length: f64, n: usize, s: &Sums, idx: usize) -> TubeInvariants {
    let [tr, sec, ric, tau] = s.curv;
    // τ^P = τ − 2ρ(N) + (tr S)² − tr S², and (tr S)² − tr S² is invariant under S ↦ −S.
    TubeInvariants {
        radius: r,
        length,
        volume: s.volume[idx],
        area: s.area[idx],
        total_mean_curvature: -tr / (n - 1) as f64,
        total_scalar_curvature: tau - 2.0 * ric + sec,
        normal_ricci: ric,
        ambient_scalar: tau,
        errors: InvariantErrors::default(),
    }
}

fn invariant_errors(
    fine: &TubeInvariants,
    coarse: Option<&TubeInvariants>,
    rtol: f64,
) -> InvariantErrors {
    let e = |a: f64, b: Option<f64>, scale: f64| {
        b.map_or(0.0, |b| (a - b).abs()) + 10.0 * rtol * scale + 1e2 * f64::EPSILON * scale
    };
    let scale = fine.area.abs() / fine.radius.max(1e-300);
    InvariantErrors {
        volume: e(fine.volume, coarse.map(|c| c.volume), fine.volume.abs()),
        area: e(fine.area, coarse.map(|c| c.area), fine.area.abs()),
        total_mean_curvature: e(
            fine.total_mean_curvature,
            coarse.map(|c| c.total_mean_curvature),
            scale,
        ),
        total_scalar_curvature: e(
            fine.total_scalar_curvature,
            coarse.map(|c| c.total_scalar_curvature),
            scale / fine.radius.max(1e-300),
        ),
        normal_ricci: e(
            fine.normal_ricci,
            coarse.map(|c| c.normal_ricci),
            fine.area.abs(),
        ),
    }
}

/// Volume, area, total mean curvature, total scalar curvature and `∫ρ(N)` at radius `r`.
pub fn tube_invariants(
    metric: &ChartMetric,
    fc: &FramedCurve,
    r: f64,
    quad: &TubeQuadrature,
) -> Result<TubeInvariants> {
    check_radius(r)?;
    let n = metric.dim();
    let lay = layout(metric, fc, quad)?;
    let fine = sweep(
        metric,
        &lay.samples,
        &lay.t_weights,
        &lay.rule,
        &[r],
        Some(0),
        &lay.ode,
    )?;
    let coarse = match &lay.coarse {
        Some(c) => Some(invariants_from(
            r,
            lay.length,
            n,
            &sweep(
                metric,
                &lay.samples,
                &lay.t_weights,
                c,
                &[r],
                Some(0),
                &lay.ode,
            )?,
            0,
        )),
        None => None,
    };
    let mut inv = invariants_from(r, lay.length, n, &fine, 0);
    inv.errors = invariant_errors(&inv, coarse.as_ref(), lay.ode.rtol);
    let tail = legendre_tail(&fine.t_profile, &lay.t_nodes, quad.t_panels);
    inv.errors.volume += tail;
    Ok(inv)
}

/// Closed-form tube invariants in a harmonic space with density profile `θ̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub invariants: TubeInvariants,
    /// `ρ = −3θ̄″(0)`.
    pub ricci: f64,
    /// `τ = nρ`.
    pub scalar: f64,
    /// Set for fitted profiles: the largest propagated derivative uncertainty.
    pub precision_warning: Option<f64>,
}

/// `V = v l`, `A = v′ l`, `H = −v″ l/(n−1)`, `C = (v‴ − 3(n−1)θ̄″(0)v′) l` with `v = ω_{n−1}r^{n−1}θ̄`.
pub fn harmonic_closed_forms(profile: &RadialProfile, r: f64, l: f64) -> Result<ClosedForms> {
    check_radius(r)?;
    let n = profile.dim();
    let v = profile.ball_volume_jet::<4>(r);
    let t2 = profile.derivative(2, 0.0);
    let n1 = (n - 1) as f64;
    let ricci = -3.0 * t2;
    let c = (v.derivative(3) - 3.0 * n1 * t2 * v.derivative(1)) * l;
    let warn = match profile.provenance() {
        crate::spaces::Provenance::ClosedForm => None,
        crate::spaces::Provenance::Fitted => {
            let w = unit_ball_volume(n - 1);
            let d: f64 = (0..=3)
                .map(|k| profile.derivative_error(k, r))
                .fold(0.0, f64::max);
            Some(w * d * r.powi(n as i32 - 1).max(1.0) * l)
        }
    };
    let invariants = TubeInvariants {
        radius: r,
        length: l,
        volume: v.value() * l,
        area: v.derivative(1) * l,
        total_mean_curvature: -v.derivative(2) * l / n1,
        total_scalar_curvature: c,
        normal_ricci: ricci * v.derivative(1) * l,
        ambient_scalar: n as f64 * ricci * v.derivative(1) * l,
        errors: InvariantErrors::default(),
    };
    Ok(ClosedForms {
        invariants,
        ricci,
        scalar: n as f64 * ricci,
        precision_warning: warn,
    })
}

/// Two-term small-radius expansion of `C_γ(r)` about a unit-speed curve with
/// constant `τ` and `ρ(γ′)` along it.
pub fn scalar_curvature_expansion(n: usize, r: f64, l: f64, tau: f64, rho_tangent: f64) -> f64 {
    let nf = n as f64;
    let lead = (nf - 2.0) * (nf - 3.0);
    let next = (nf - 3.0) / (6.0 * (nf - 1.0)) * ((nf - 4.0) * tau + (nf + 2.0) * rho_tangent);
    (nf - 1.0) * unit_ball_volume(n - 1) * r.powi(n as i32 - 4) * (lead - next * r * r) * l
}

/// Finite-difference derivatives of `V_γ` against the Steiner coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerReport {
    pub radius: f64,
    /// `A_γ(r)`, `−∫μ^P`, `∫(ρ(N) + τ^P − τ)`.
    pub coefficients: [f64; 3],
    /// `V′`, `V″`, `V‴` by central differences at the smallest `Δ`.
    pub fd_derivatives: [f64; 3],
    /// `(Δ, max over ± of |V(r±Δ) − cubic Steiner polynomial|)`.
    pub residuals: Vec<(f64, f64)>,
    /// Residual ratios between consecutive `Δ` (larger over smaller).
    pub ratios: Vec<f64>,
}

/// Compares `V_γ(r ± Δ)`, `V_γ(r ± 2Δ)` from one set of rays with the Steiner polynomial at `r`.
pub fn steiner_check(
    metric: &ChartMetric,
    fc: &FramedCurve,
    r: f64,
    deltas: &[f64],
    quad: &TubeQuadrature,
) -> Result<SteinerReport> {
    check_radius(r)?;
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0) || 2.0 * d >= r) {
        return Err(Error::Parameter(
            "Steiner steps must be positive and below r/2".into(),
        ));
    }
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let mut stops: Vec<f64> = vec![r];
    for d in &ds {
        stops.extend([r - 2.0 * d, r - d, r + d, r + 2.0 * d]);
    }
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let at = |x: f64| stops.iter().position(|s| *s == x).expect("stop present");
    let lay = layout(
        metric,
        fc,
        &TubeQuadrature {
            estimate_error: false,
            ..quad.clone()
        },
    )?;
    let s = sweep(
        metric,
        &lay.samples,
        &lay.t_weights,
        &lay.rule,
        &stops,
        Some(at(r)),
        &lay.ode,
    )?;
    let v = |x: f64| s.volume[at(x)];
    let [tr, sec, ric, _] = s.curv;
    let coefficients = [s.area[at(r)], tr, sec - ric];
    let poly = |d: f64| {
        v(r) + coefficients[0] * d
            + coefficients[1] * d * d / 2.0
            + coefficients[2] * d * d * d / 6.0
    };
    let residuals: Vec<(f64, f64)> = ds
        .iter()
        .map(|&d| {
            (
                d,
                (v(r + d) - poly(d)).abs().max((v(r - d) - poly(-d)).abs()),
            )
        })
        .collect();
    let ratios = residuals.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let h = *ds.last().expect("nonempty");
    let (m2, m1, z, p1, p2) = (v(r - 2.0 * h), v(r - h), v(r), v(r + h), v(r + 2.0 * h));
    let fd = [
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h),
        (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h),
    ];
    Ok(SteinerReport {
        radius: r,
        coefficients,
        fd_derivatives: fd,
        residuals,
        ratios,
    })
}

#[cfg(test)]
mod tests;
