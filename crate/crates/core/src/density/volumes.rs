use super::{frame_at, theta_profile, CONJUGATE_GUARD};
use crate::error::{ConjugateHit, Error, Result};
use crate::manifold::{
    integrate_geodesic_with, trace_ray, ChartMetric, FieldInit, RaySpec, TangentVector,
};
use crate::numerics::linalg::complete_basis;
use crate::numerics::par::par_map_until;
use crate::numerics::{pairwise_sum, OdeOptions};
use crate::sphere::SphereRule;

/// Volumes of the geodesic sphere, ball and the two half-balls cut by `u^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallVolumes {
    pub radius: f64,
    pub sphere_area: f64,
    pub ball_volume: f64,
    /// `b(r; u)`.
    pub half_ball: f64,
    /// `b(r; −u)`.
    pub half_ball_opposite: f64,
    /// Error estimate shared by the ball and sphere values.
    pub error: f64,
    pub half_ball_error: f64,
}

struct RuleSums {
    area: f64,
    ball: f64,
    plus: f64,
    minus: f64,
}

/// Rule re-aimed at `e₁` and the hemisphere sign of each node (`0` on the equator).
fn split_weights(rule: &SphereRule) -> Result<(SphereRule, Vec<f64>)> {
    let n = rule.dim();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let rule = match rule.pole() {
        Some(p) if p != e1.as_slice() => rule.oriented(&e1)?,
        _ => rule.clone(),
    };
    let sides = (0..rule.len())
        .map(|i| {
            let s = if rule.pole().is_some() {
                f64::from(rule.side(i))
            } else {
                rule.node(i)[0]
            };
            if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((rule, sides))
}

fn rule_sums(
    metric: &ChartMetric,
    p: &[f64],
    frame: &[Vec<f64>],
    r: f64,
    rule: &SphereRule,
    ode: &OdeOptions,
) -> Result<RuleSums> {
    let n = metric.dim();
    let g = metric.metric(p)?;
    let (rule, sides) = split_weights(rule)?;
    let per_dir = par_map_until(
        rule.len(),
        |e| matches!(e, Error::ConjugatePoint { .. }),
        |i| {
            let node = rule.node(i);
            let mut w = vec![0.0; n];
            for (c, e) in node.iter().zip(frame) {
                for (wi, ei) in w.iter_mut().zip(e) {
                    *wi += c * ei;
                }
            }
            let basis = complete_basis(&g, &[w.clone()]);
            let spec = RaySpec {
                origin: p.to_vec(),
                velocity: basis[0].clone(),
                fields: basis[1..]
                    .iter()
                    .map(|e| FieldInit {
                        value: vec![0.0; n],
                        derivative: e.clone(),
                    })
                    .collect(),
                frame: Vec::new(),
                accumulate_volume: true,
            };
            let mut out = (0.0, 0.0);
            trace_ray(metric, &spec, &[r], ode, |_, pt| {
                let el = pt.volume_element();
                if el < CONJUGATE_GUARD * r.powi(n as i32 - 1) {
                    return Err(Error::ConjugatePoint { radius: r });
                }
                out = (el, pt.volume);
                Ok(())
            })?;
            Ok(out)
        },
    )?;
    let mut hits = Vec::new();
    let mut vals = Vec::with_capacity(rule.len());
    for (i, res) in per_dir.into_iter().enumerate() {
        match res {
            Ok(v) => vals.push(v),
            Err(Error::ConjugatePoint { radius }) => hits.push(ConjugateHit {
                direction: rule.node(i).to_vec(),
                radius,
            }),
            Err(e) => return Err(e),
        }
    }
    if !hits.is_empty() {
        return Err(Error::ConjugateDirections(hits));
    }
    let w = rule.weights();
    let area: Vec<f64> = vals.iter().zip(w).map(|(v, w)| w * v.0).collect();
    let ball: Vec<f64> = vals.iter().zip(w).map(|(v, w)| w * v.1).collect();
    let plus: Vec<f64> = ball
        .iter()
        .zip(&sides)
        .map(|(b, s)| {
            if *s > 0.0 {
                *b
            } else if *s == 0.0 {
                0.5 * b
            } else {
                0.0
            }
        })
        .collect();
    let minus: Vec<f64> = ball
        .iter()
        .zip(&sides)
        .map(|(b, s)| {
            if *s < 0.0 {
                *b
            } else if *s == 0.0 {
                0.5 * b
            } else {
                0.0
            }
        })
        .collect();
    Ok(RuleSums {
        area: pairwise_sum(&area),
        ball: pairwise_sum(&ball),
        plus: pairwise_sum(&plus),
        minus: pairwise_sum(&minus),
    })
}

/// Sphere area `r^{n−1}∫θ(rv)dv`, ball volume and half-ball volumes
/// `∫₀^r ∫_{S^±(u)} ρ^{n−1}θ(ρv) dv dρ`.
///
/// Rule nodes are read in an orthonormal frame at `p` with first vector `u`;
/// the radial integral rides along each ray's ODE. The error combines the
/// difference to the next-coarser rule with an ODE and rounding floor.
pub fn ball_volumes_with(
    metric: &ChartMetric,
    p: &[f64],
    u: &[f64],
    r: f64,
    rule: &SphereRule,
    ode: &OdeOptions,
) -> Result<BallVolumes> {
    if rule.dim() != metric.dim() {
        return Err(Error::Parameter(
            "rule dimension differs from the manifold".into(),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::Parameter("radius must be positive".into()));
    }
    let frame = frame_at(metric, p, u)?;
    let fine = rule_sums(metric, p, &frame, r, rule, ode)?;
    let floor =
        |x: f64| 10.0 * ode.rtol * x.abs() + f64::EPSILON * x.abs() * (rule.len() as f64).sqrt();
    let (err, half_err) = match rule.coarser()? {
        Some(c) => {
            let coarse = rule_sums(metric, p, &frame, r, &c, ode)?;
            (
                (fine.ball - coarse.ball)
                    .abs()
                    .max((fine.area - coarse.area).abs())
                    + floor(fine.ball),
                (fine.plus - coarse.plus)
                    .abs()
                    .max((fine.minus - coarse.minus).abs())
                    + floor(fine.ball),
            )
        }
        None => (floor(fine.ball), floor(fine.ball)),
    };
    Ok(BallVolumes {
        radius: r,
        sphere_area: fine.area,
        ball_volume: fine.ball,
        half_ball: fine.plus,
        half_ball_opposite: fine.minus,
        error: err,
        half_ball_error: half_err,
    })
}

pub fn ball_volumes(
    metric: &ChartMetric,
    p: &[f64],
    u: &[f64],
    r: f64,
    rule: &SphereRule,
) -> Result<BallVolumes> {
    ball_volumes_with(metric, p, u, r, rule, &OdeOptions::default())
}

/// Base point and initial direction of one sampled geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct DatriSample {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatriReport {
    /// `max − min` of `b(r; u)` over samples, worst radius.
    pub half_ball_defect: f64,
    pub half_ball_error: f64,
    /// Worst `max_t − min_t` of `θ(s γ′(t))` over samples and radii.
    pub first_integral_defect: f64,
    pub first_integral_error: f64,
    /// Worst `|b(r; u) + b(r; −u) − vol ℬ(r)|` and the matching half-ball error.
    pub half_ball_sum_defect: f64,
    pub half_ball_sum_error: f64,
}

/// Half-ball homogeneity and first-integral defects.
///
/// Each sample contributes `b(r; u)` at its base point, and `θ(s γ′(t))` at
/// `γ(t)` for every `t` in `times` along the unit-speed geodesic it starts.
/// First-integral errors compare against a run at ten times the tolerance.
pub fn datri_checks(
    metric: &ChartMetric,
    samples: &[DatriSample],
    radii: &[f64],
    times: &[f64],
    rule: &SphereRule,
    ode: &OdeOptions,
) -> Result<DatriReport> {
    if samples.is_empty() || radii.is_empty() {
        return Err(Error::Parameter(
            "D'Atri checks need samples and radii".into(),
        ));
    }
    let mut radii_sorted = radii.to_vec();
    radii_sorted.sort_by(f64::total_cmp);
    let loose = ode.clone().with_rtol(ode.rtol * 10.0);

    let mut hb_defect: f64 = 0.0;
    let mut hb_error: f64 = 0.0;
    let mut sum_defect: f64 = 0.0;
    let mut sum_error: f64 = 0.0;
    for &r in &radii_sorted {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in samples {
            let b = ball_volumes_with(metric, &s.point, &s.direction, r, rule, ode)?;
            lo = lo.min(b.half_ball);
            hi = hi.max(b.half_ball);
            hb_error = hb_error.max(b.half_ball_error);
            let d = (b.half_ball + b.half_ball_opposite - b.ball_volume).abs();
            if d > sum_defect {
                sum_defect = d;
                sum_error = b.half_ball_error;
            }
        }
        hb_defect = hb_defect.max(hi - lo);
    }

    let mut fi_defect: f64 = 0.0;
    let mut fi_error: f64 = 0.0;
    for s in samples {
        let start = TangentVector::new(metric, &s.point, &s.direction)?.unit()?;
        let mut states = Vec::with_capacity(times.len());
        integrate_geodesic_with(metric, &start.point, &start.components, times, ode, |st| {
            states.push(st);
            Ok(())
        })?;
        let mut table = Vec::with_capacity(states.len());
        for st in &states {
            let u = TangentVector::new(metric, &st.position, &st.velocity)?.unit()?;
            let fine = theta_profile(metric, &u, &radii_sorted, ode)?;
            let coarse = theta_profile(metric, &u, &radii_sorted, &loose)?;
            for (f, c) in fine.iter().zip(&coarse) {
                fi_error = fi_error.max((f - c).abs());
            }
            table.push(fine);
        }
        for k in 0..radii_sorted.len() {
            let col = table.iter().map(|row| row[k]);
            let hi = col.clone().fold(f64::NEG_INFINITY, f64::max);
            let lo = col.fold(f64::INFINITY, f64::min);
            fi_defect = fi_defect.max(hi - lo);
        }
    }
    Ok(DatriReport {
        half_ball_defect: hb_defect,
        half_ball_error: hb_error,
        first_integral_defect: fi_defect,
        first_integral_error: 2.0 * fi_error,
        half_ball_sum_defect: sum_defect,
        half_ball_sum_error: sum_error,
    })
}
