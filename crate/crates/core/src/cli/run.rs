use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CurveSpec, ExperimentConfig, ExperimentKind};
use super::functions;
use super::report::{Report, ReportMeta, ReportRow, Verdict};
use crate::density::{
    ball_volumes_with, datri_checks, geodesic_involution_with, mean_curvature_forms, theta_with,
    DatriSample,
};
use crate::error::{Error, Result};
use crate::manifold::{curvature, ChartMetric, TangentVector};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::{unit_ball_volume, unit_sphere_area, OdeOptions};
use crate::series::{
    fit_coefficients_with, harmonic_up_to_order, parity_check, vanhecke_relation_check, FitWindow,
    SamplePoint,
};
use crate::spaces::{closed_form_profile, make_space, RadialProfile, SpaceSpec};
use crate::sphere::{build_rule, cosine_transform, hemisphere_moment, stiefel_fubini_check};
use crate::tube::{
    harmonic_closed_forms, scalar_curvature_expansion, steiner_check, tube_invariants,
    tube_volumes, FramedCurve,
};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Copy, Debug)]
enum Check {
    /// `|value − reference| ≤ tol`.
    Abs(f64),
    /// `|value − reference| ≤ tol·|reference|`.
    Rel(f64),
    /// `|value − reference| ≤ k·error`.
    Errors(f64),
}

struct Row<'a> {
    r: Option<f64>,
    quantity: String,
    value: f64,
    error: f64,
    reference: Option<f64>,
    check: Option<Check>,
    /// Violation a negative control must exceed; the check tolerance when absent.
    fail_margin: Option<f64>,
    space: &'a str,
}

impl<'a> Row<'a> {
    fn new(
        space: &'a str,
        r: Option<f64>,
        quantity: impl Into<String>,
        value: f64,
        error: f64,
    ) -> Self {
        Self {
            r,
            quantity: quantity.into(),
            value,
            error,
            reference: None,
            check: None,
            fail_margin: None,
            space,
        }
    }

    fn against(mut self, reference: f64, check: Check) -> Self {
        self.reference = Some(reference);
        self.check = Some(check);
        self
    }

    fn against_opt(self, reference: Option<f64>, check: Check) -> Self {
        match reference {
            Some(x) => self.against(x, check),
            None => self,
        }
    }

    fn margin(mut self, m: f64) -> Self {
        self.fail_margin = Some(m);
        self
    }
}

struct Ctx<'c> {
    cfg: &'c ExperimentConfig,
    rows: Vec<ReportRow>,
    ode: OdeOptions,
}

/// `name[suffix]` → `name`.
fn base_name(q: &str) -> &str {
    q.split('[').next().unwrap_or(q)
}

impl Ctx<'_> {
    fn tol(&self, quantity: &str, default: f64) -> f64 {
        self.cfg.tolerance(quantity, default)
    }

    fn push(&mut self, row: Row<'_>) {
        let error = row.error.abs();
        let (ok, allowed) = match (row.check, row.reference) {
            (Some(c), Some(reference)) => {
                let allowed = match c {
                    Check::Abs(t) => t,
                    Check::Rel(t) => t * reference.abs(),
                    Check::Errors(k) => k * error,
                };
                let d = (row.value - reference).abs();
                (d <= allowed, allowed)
            }
            _ => (row.value.is_finite(), 0.0),
        };
        let base = base_name(&row.quantity);
        let negative = self
            .cfg
            .expect_fail
            .iter()
            .any(|q| match q.rsplit_once(':') {
                Some((space, name)) => space == row.space && name == base,
                None => q == base,
            });
        let pass = if !negative {
            if ok {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        } else {
            let d = row.reference.map_or(f64::NAN, |x| (row.value - x).abs());
            if !ok && d > row.fail_margin.unwrap_or(allowed).max(allowed) {
                Verdict::ExpectedFail
            } else {
                Verdict::Fail
            }
        };
        self.rows.push(ReportRow {
            experiment: self
                .cfg
                .id
                .clone()
                .unwrap_or_else(|| self.cfg.experiment.name().to_string()),
            space: row.space.to_string(),
            r: row.r,
            quantity: row.quantity,
            value: row.value,
            error,
            reference: row.reference,
            pass,
        });
    }
}

/// Result of one invocation: the report and the process exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub status: i32,
}

/// Runs `cfg`; numerical failures end the run with a diagnostic row and exit code 3.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut ctx = Ctx {
        cfg,
        rows: Vec::new(),
        ode: OdeOptions::default().with_rtol(cfg.quadrature.ode_rtol),
    };
    let mut status = EXIT_OK;
    for spec in cfg.spaces()? {
        if let Err(e) = run_space(&mut ctx, &spec) {
            if !e.is_numerical() {
                return Err(e);
            }
            let space = spec.descriptor();
            ctx.rows.push(ReportRow {
                experiment: cfg
                    .id
                    .clone()
                    .unwrap_or_else(|| cfg.experiment.name().to_string()),
                space,
                r: None,
                quantity: format!("numerical-failure: {e}"),
                value: f64::NAN,
                error: f64::NAN,
                reference: None,
                pass: Verdict::Fail,
            });
            status = EXIT_NUMERICAL;
            break;
        }
    }
    if status == EXIT_OK && ctx.rows.iter().any(|r| !r.pass.is_ok()) {
        status = EXIT_CHECK_FAILED;
    }
    let meta = ReportMeta {
        config: serde_json::to_value(cfg)?,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: cfg.timestamp.clone(),
    };
    Ok(Outcome {
        report: Report {
            meta,
            rows: ctx.rows,
        },
        status,
    })
}

fn run_space(ctx: &mut Ctx<'_>, spec: &SpaceSpec) -> Result<()> {
    match ctx.cfg.experiment {
        ExperimentKind::TransformCosine => return transform_cosine(ctx, spec),
        ExperimentKind::StiefelFubini => return stiefel_fubini(ctx, spec),
        _ => {}
    }
    let metric = make_space(spec)?;
    let profile = closed_form_profile(spec).ok();
    let space = spec.descriptor();
    match ctx.cfg.experiment {
        ExperimentKind::DensityProfile => density_profile(ctx, &metric, profile.as_ref(), &space),
        ExperimentKind::BallVolumes => ball_volumes(ctx, &metric, profile.as_ref(), &space),
        ExperimentKind::CheckDatri => check_datri(ctx, &metric, &space),
        ExperimentKind::CheckHarmonic => check_harmonic(ctx, &metric, &space),
        ExperimentKind::SeriesFit => series_fit(ctx, &metric, profile.as_ref(), &space),
        ExperimentKind::TubeVolume => tube_volume(ctx, &metric, profile.as_ref(), &space),
        ExperimentKind::TubeInvariants => {
            tube_invariants_rows(ctx, &metric, profile.as_ref(), &space)
        }
        ExperimentKind::SteinerCheck => steiner(ctx, &metric, &space),
        ExperimentKind::TransformCosine | ExperimentKind::StiefelFubini => unreachable!(),
    }
}

/// `(1, 1/2, 1/4, …)`, a fixed direction off every coordinate hyperplane.
fn generic_direction(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Configured points (the chart center when none), then the seeded random ones.
fn base_points(cfg: &ExperimentConfig, metric: &ChartMetric) -> Result<Vec<Vec<f64>>> {
    let n = metric.dim();
    let mut points = if cfg.points.is_empty() {
        vec![metric.center().to_vec()]
    } else {
        cfg.points.clone()
    };
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::Config(format!(
            "point {p:?} has the wrong dimension for {}",
            metric.label()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xba5e);
    while points.len() < cfg.points.len().max(1) + cfg.random_points {
        let p: Vec<f64> = metric
            .center()
            .iter()
            .map(|c| c + rng.random_range(-1.0..=1.0) * cfg.point_spread)
            .collect();
        if metric.contains(&p) {
            points.push(p);
        }
    }
    Ok(points)
}

/// Explicit directions at every base point, then the seeded random ones; the
/// generic direction when neither is given.
fn samples(cfg: &ExperimentConfig, metric: &ChartMetric) -> Result<Vec<SamplePoint>> {
    let n = metric.dim();
    let points = base_points(cfg, metric)?;
    if let Some(d) = cfg.directions.iter().find(|d| d.len() != n) {
        return Err(Error::Config(format!(
            "direction {d:?} has the wrong dimension for {}",
            metric.label()
        )));
    }
    let mut out = Vec::new();
    for p in &points {
        for d in &cfg.directions {
            out.push(SamplePoint {
                point: p.clone(),
                direction: d.clone(),
            });
        }
    }
    out.extend(crate::series::sample_directions(
        &points,
        cfg.random_directions,
        cfg.seed,
    ));
    if out.is_empty() {
        out.extend(points.iter().map(|p| SamplePoint {
            point: p.clone(),
            direction: generic_direction(n),
        }));
    }
    Ok(out)
}

fn unit(metric: &ChartMetric, s: &SamplePoint) -> Result<TangentVector> {
    TangentVector::new(metric, &s.point, &s.direction)?.unit()
}

fn density_profile(
    ctx: &mut Ctx<'_>,
    metric: &ChartMetric,
    profile: Option<&RadialProfile>,
    space: &str,
) -> Result<()> {
    let cfg = ctx.cfg;
    let radii = cfg.radii.values()?;
    let n1 = (metric.dim() - 1) as f64;
    let loose = ctx.ode.clone().with_rtol(ctx.ode.rtol * 10.0);
    let (t_theta, t_inv, t_h) = (
        ctx.tol("theta", 1e-8),
        ctx.tol("theta_involution", 1e-7),
        ctx.tol("h_radial", 1e-5),
    );
    let all = samples(cfg, metric)?;
    let explicit = all.len() - cfg.random_directions * base_points(cfg, metric)?.len();
    // Random samples also draw their radius from the configured range.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let (r_lo, r_hi) = (radii[0], radii[radii.len() - 1]);
    let mut worst_inv: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for (k, s) in all.iter().enumerate() {
        let u = unit(metric, s)?;
        let rs: Vec<f64> = if k < explicit {
            radii.clone()
        } else {
            vec![rng.random_range(r_lo..=r_hi)]
        };
        for r in rs {
            let v = u.scaled(r);
            let th = theta_with(metric, &v, &ctx.ode)?;
            let th_err = (th - theta_with(metric, &v, &loose)?).abs();
            let iv = geodesic_involution_with(metric, &v, &ctx.ode)?;
            let th_iv = theta_with(metric, &iv, &ctx.ode)?;
            let mc = mean_curvature_forms(metric, &v)?;
            worst_inv = worst_inv.max((th_iv - th).abs() / th.abs());
            worst_h = worst_h.max((mc.trace_form - mc.radial_form).abs());
            if k >= explicit {
                continue;
            }
            let closed = profile.map(|p| p.value(r));
            ctx.push(
                Row::new(space, Some(r), "theta", th, th_err)
                    .against_opt(closed, Check::Rel(t_theta)),
            );
            ctx.push(
                Row::new(space, Some(r), "theta_involution", th_iv, th_err)
                    .against(th, Check::Rel(t_inv)),
            );
            let h_closed = profile.map(|p| -n1 / r - p.derivative(1, r) / p.value(r));
            ctx.push(
                Row::new(space, Some(r), "h_trace", mc.trace_form, 0.0)
                    .against_opt(h_closed, Check::Abs(t_h)),
            );
            ctx.push(
                Row::new(space, Some(r), "h_radial", mc.radial_form, 0.0)
                    .against(mc.trace_form, Check::Abs(t_h)),
            );
        }
    }
    let t_inv_max = ctx.tol("involution_defect_max", 1e-7);
    let t_h_max = ctx.tol("mean_curvature_defect_max", 1e-5);
    ctx.push(
        Row::new(space, None, "involution_defect_max", worst_inv, 0.0)
            .against(0.0, Check::Abs(t_inv_max)),
    );
    ctx.push(
        Row::new(space, None, "mean_curvature_defect_max", worst_h, 0.0)
            .against(0.0, Check::Abs(t_h_max)),
    );
    Ok(())
}

/// `∫₀^r nω_n ρ^{n−1} θ̄(ρ) dρ` by 32-point Gauss–Legendre.
fn closed_ball_volume(p: &RadialProfile, r: f64) -> f64 {
    let n = p.dim();
    gauss_legendre(32)
        .iter()
        .map(|(x, w)| {
            let rho = 0.5 * r * (x + 1.0);
            0.5 * r * w * unit_sphere_area(n) * rho.powi(n as i32 - 1) * p.value(rho)
        })
        .sum()
}

fn sphere_rule(cfg: &ExperimentConfig, n: usize) -> Result<crate::sphere::SphereRule> {
    build_rule(n, cfg.quadrature.rule_level, cfg.quadrature.rule_kind)
}

fn ball_volumes(
    ctx: &mut Ctx<'_>,
    metric: &ChartMetric,
    profile: Option<&RadialProfile>,
    space: &str,
) -> Result<()> {
    let cfg = ctx.cfg;
    let n = metric.dim();
    let rule = sphere_rule(cfg, n)?;
    let t_rel = ctx.tol("ball_volume", 1e-8);
    let k_sum = ctx.tol("half_ball_sum", 2.0);
    for s in samples(cfg, metric)? {
        for r in cfg.radii.values()? {
            let b = ball_volumes_with(metric, &s.point, &s.direction, r, &rule, &ctx.ode)?;
            let area = profile.map(|p| unit_sphere_area(n) * r.powi(n as i32 - 1) * p.value(r));
            let ball = profile.map(|p| closed_ball_volume(p, r));
            ctx.push(
                Row::new(space, Some(r), "sphere_area", b.sphere_area, b.error)
                    .against_opt(area, Check::Rel(t_rel)),
            );
            ctx.push(
                Row::new(space, Some(r), "ball_volume", b.ball_volume, b.error)
                    .against_opt(ball, Check::Rel(t_rel)),
            );
            ctx.push(
                Row::new(space, Some(r), "half_ball", b.half_ball, b.half_ball_error)
                    .against_opt(ball.map(|v| v / 2.0), Check::Rel(t_rel)),
            );
            ctx.push(
                Row::new(
                    space,
                    Some(r),
                    "half_ball_sum",
                    b.half_ball + b.half_ball_opposite,
                    b.half_ball_error,
                )
                .against(b.ball_volume, Check::Errors(k_sum)),
            );
        }
    }
    Ok(())
}

fn check_datri(ctx: &mut Ctx<'_>, metric: &ChartMetric, space: &str) -> Result<()> {
    let cfg = ctx.cfg;
    let rule = sphere_rule(cfg, metric.dim())?;
    let times = if cfg.times.is_empty() {
        vec![0.0, 0.25, 0.5, 0.75, 1.0]
    } else {
        cfg.times.clone()
    };
    let ds: Vec<DatriSample> = samples(cfg, metric)?
        .into_iter()
        .map(|s| DatriSample {
            point: s.point,
            direction: s.direction,
        })
        .collect();
    let rep = datri_checks(metric, &ds, &cfg.radii.values()?, &times, &rule, &ctx.ode)?;
    let t_hb = ctx.tol("half_ball_defect", 1e-6);
    let t_fi = ctx.tol("first_integral_defect", 1e-6);
    let m_hb = ctx.tol("half_ball_defect.fail", 1e-3);
    let m_fi = ctx.tol("first_integral_defect.fail", 1e-3);
    let k_sum = ctx.tol("half_ball_sum_defect", 2.0);
    ctx.push(
        Row::new(
            space,
            None,
            "half_ball_defect",
            rep.half_ball_defect,
            rep.half_ball_error,
        )
        .against(0.0, Check::Abs(t_hb))
        .margin(m_hb),
    );
    ctx.push(
        Row::new(
            space,
            None,
            "first_integral_defect",
            rep.first_integral_defect,
            rep.first_integral_error,
        )
        .against(0.0, Check::Abs(t_fi))
        .margin(m_fi),
    );
    ctx.push(
        Row::new(
            space,
            None,
            "half_ball_sum_defect",
            rep.half_ball_sum_defect,
            rep.half_ball_sum_error,
        )
        .against(0.0, Check::Errors(k_sum)),
    );
    Ok(())
}

fn ricci_of_unit(metric: &ChartMetric, u: &TangentVector) -> Result<f64> {
    Ok(curvature(metric, &u.point)?.ricci_of(&u.components))
}

fn check_harmonic(ctx: &mut Ctx<'_>, metric: &ChartMetric, space: &str) -> Result<()> {
    let cfg = ctx.cfg;
    let order = cfg.order.unwrap_or(6);
    let ss = samples(cfg, metric)?;
    let points = base_points(cfg, metric)?.len();
    if points < 3 || ss.len() < 8 * points {
        return Err(Error::Config(
            "the harmonicity test needs at least 3 base points with 8 directions each".into(),
        ));
    }
    let rep = harmonic_up_to_order(metric, order, &ss, cfg.window, &ctx.ode)?;
    let last = rep.first_failure.unwrap_or(order);
    for o in rep.orders.iter().take(last + 1) {
        ctx.push(
            Row::new(
                space,
                None,
                format!("a{}_variation", o.order),
                o.variation,
                o.error_bar,
            )
            .against(0.0, Check::Errors(1.0)),
        );
    }
    let mut a0 = (0.0f64, 0.0f64);
    let mut a1 = (0.0f64, 0.0f64);
    let mut a2: f64 = 0.0;
    for (s, f) in ss.iter().zip(&rep.fits) {
        if (f.coefficients[0] - 1.0).abs() > a0.0 {
            a0 = ((f.coefficients[0] - 1.0).abs(), f.errors[0]);
        }
        if f.coefficients[1].abs() / f.errors[1].max(f64::MIN_POSITIVE)
            > a1.0.abs() / a1.1.max(f64::MIN_POSITIVE)
        {
            a1 = (f.coefficients[1], f.errors[1]);
        }
        let ric = ricci_of_unit(metric, &unit(metric, s)?)?;
        a2 = a2.max((f.coefficients[2] + ric / 6.0).abs());
    }
    ctx.push(
        Row::new(space, None, "a0_defect_max", a0.0, a0.1)
            .against(0.0, Check::Errors(ctx.tol("a0_defect_max", 3.0))),
    );
    ctx.push(
        Row::new(space, None, "a1_worst", a1.0, a1.1)
            .against(0.0, Check::Errors(ctx.tol("a1_worst", 3.0))),
    );
    ctx.push(
        Row::new(space, None, "a2_ricci_defect_max", a2, 0.0)
            .against(0.0, Check::Abs(ctx.tol("a2_ricci_defect_max", 1e-4))),
    );
    let up_to = rep.passes_up_to.map_or(-1.0, |k| k as f64);
    ctx.push(
        Row::new(space, None, "harmonic_up_to", up_to, 0.0).against(order as f64, Check::Abs(0.0)),
    );
    Ok(())
}

fn series_fit(
    ctx: &mut Ctx<'_>,
    metric: &ChartMetric,
    profile: Option<&RadialProfile>,
    space: &str,
) -> Result<()> {
    let cfg = ctx.cfg;
    let order = cfg.order.unwrap_or(crate::series::MAX_ORDER);
    let taylor = profile.map(|p| p.taylor(order));
    let t_a0 = ctx.tol("a0", 1e-8);
    let k_a1 = ctx.tol("a1", 3.0);
    let t_a2 = ctx.tol("a2", 1e-4);
    let k_par = ctx.tol("parity", 3.0);
    let k_van = ctx.tol("vanhecke", 3.0);
    for s in samples(cfg, metric)? {
        let u = unit(metric, &s)?;
        let window = match cfg.window {
            Some(w) => w,
            None => FitWindow::for_point(metric, &u.point)?,
        };
        let fit = fit_coefficients_with(metric, &u, order, window, &ctx.ode)?;
        let ric = ricci_of_unit(metric, &u)?;
        for (i, (c, e)) in fit.coefficients.iter().zip(&fit.errors).enumerate() {
            let q = format!("a{i}");
            let row = Row::new(space, None, q.clone(), *c, *e);
            let row = match i {
                0 => row.against(1.0, Check::Abs(t_a0)),
                1 => row.against(0.0, Check::Errors(k_a1)),
                2 => row.against(-ric / 6.0, Check::Abs(t_a2)),
                _ if i + 2 <= order && i <= 6 => {
                    let t = ctx.tol(&q, 1e-4);
                    row.against_opt(taylor.as_ref().map(|t| t[i]), Check::Abs(t))
                }
                _ => row,
            };
            ctx.push(row);
        }
        let back = fit_coefficients_with(metric, &u.scaled(-1.0), order, window, &ctx.ode)?;
        for d in parity_check(&fit, &back)? {
            ctx.push(
                Row::new(
                    space,
                    None,
                    format!("parity_a{}", d.order),
                    d.defect,
                    d.error,
                )
                .against(0.0, Check::Errors(k_par)),
            );
        }
        for &k in &cfg.vanhecke {
            let v = vanhecke_relation_check(metric, &u, k, &ctx.ode)?;
            let err = v.lhs_error.hypot(v.rhs_error);
            if v.inconclusive {
                let mut row = Row::new(
                    space,
                    None,
                    format!("vanhecke_k{k}[inconclusive]"),
                    v.lhs,
                    err,
                );
                row.reference = Some(v.rhs);
                ctx.push(row);
            } else {
                ctx.push(
                    Row::new(space, None, format!("vanhecke_k{k}"), v.lhs, err)
                        .against(v.rhs, Check::Errors(k_van)),
                );
            }
        }
    }
    Ok(())
}

fn framed_curves(cfg: &ExperimentConfig, metric: &ChartMetric) -> Result<Vec<FramedCurve>> {
    let n = metric.dim();
    let specs = if cfg.curves.is_empty() {
        vec![CurveSpec::Geodesic {
            point: None,
            direction: None,
            length: 1.0,
        }]
    } else {
        cfg.curves.clone()
    };
    specs
        .iter()
        .map(|c| match c {
            CurveSpec::Geodesic {
                point,
                direction,
                length,
            } => {
                let p = point.clone().unwrap_or_else(|| metric.center().to_vec());
                let d = direction.clone().unwrap_or_else(|| generic_direction(n));
                if p.len() != n || d.len() != n {
                    return Err(Error::Config(format!(
                        "curve data has the wrong dimension for {}",
                        metric.label()
                    )));
                }
                FramedCurve::geodesic(metric, &p, &d, *length)
            }
            CurveSpec::Circle {
                center,
                radius,
                plane: [a, b],
            } => {
                if center.len() != n || *a >= n || *b >= n || a == b || !(*radius > 0.0) {
                    return Err(Error::Config("invalid circle".into()));
                }
                let (c, rad, a, b) = (center.clone(), *radius, *a, *b);
                let at = move |t: f64, k: usize| {
                    let mut x = vec![0.0; c.len()];
                    let (cs, sn) = (t.cos(), t.sin());
                    // k-th derivative of (cos t, sin t).
                    let (ca, sb) = match k % 4 {
                        0 => (cs, sn),
                        1 => (-sn, cs),
                        2 => (-cs, -sn),
                        _ => (sn, -cs),
                    };
                    if k == 0 {
                        x.clone_from(&c);
                    }
                    x[a] += rad * ca;
                    x[b] += rad * sb;
                    x
                };
                let (p0, p1, p2) = (at.clone(), at.clone(), at);
                FramedCurve::from_coordinates(
                    move |t| p0(t, 0),
                    move |t| p1(t, 1),
                    move |t| p2(t, 2),
                    0.0,
                    2.0 * std::f64::consts::PI,
                )
            }
        })
        .collect()
}

fn curve_label(i: usize, count: usize, q: &str) -> String {
    if count > 1 {
        format!("{q}[c{i}]")
    } else {
        q.to_string()
    }
}

fn tube_volume(
    ctx: &mut Ctx<'_>,
    metric: &ChartMetric,
    profile: Option<&RadialProfile>,
    space: &str,
) -> Result<()> {
    let cfg = ctx.cfg;
    let radii = cfg.radii.values()?;
    let curves = framed_curves(cfg, metric)?;
    let t_rel = ctx.tol("tube_volume", 1e-4);
    let mut table = Vec::new();
    for (i, fc) in curves.iter().enumerate() {
        let l = fc.length(metric)?;
        let vols = tube_volumes(metric, fc, &radii, &cfg.quadrature.tube)?;
        for (r, v) in radii.iter().zip(&vols) {
            let closed = match profile {
                Some(p) => Some(harmonic_closed_forms(p, *r, l)?.invariants.volume),
                None => None,
            };
            ctx.push(
                Row::new(
                    space,
                    Some(*r),
                    curve_label(i, curves.len(), "tube_volume"),
                    v.value,
                    v.error,
                )
                .against_opt(closed, Check::Rel(t_rel)),
            );
        }
        table.push(vols);
    }
    if curves.len() > 1 {
        let k = ctx.tol("tube_volume_spread", 2.0);
        let sep = ctx.tol("separation", 10.0);
        for (j, r) in radii.iter().enumerate() {
            let col: Vec<_> = table.iter().map(|vs| vs[j]).collect();
            let hi = col
                .iter()
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .expect("curves");
            let lo = col
                .iter()
                .min_by(|a, b| a.value.total_cmp(&b.value))
                .expect("curves");
            let err = hi.error + lo.error;
            ctx.push(
                Row::new(
                    space,
                    Some(*r),
                    "tube_volume_spread",
                    hi.value - lo.value,
                    err,
                )
                .against(0.0, Check::Errors(k))
                .margin(sep * err),
            );
        }
    }
    Ok(())
}

fn tube_invariants_rows(
    ctx: &mut Ctx<'_>,
    metric: &ChartMetric,
    profile: Option<&RadialProfile>,
    space: &str,
) -> Result<()> {
    let cfg = ctx.cfg;
    let n = metric.dim();
    let curves = framed_curves(cfg, metric)?;
    let specs = if cfg.curves.is_empty() {
        vec![CurveSpec::Geodesic {
            point: None,
            direction: None,
            length: 1.0,
        }]
    } else {
        cfg.curves.clone()
    };
    for (i, fc) in curves.iter().enumerate() {
        let l = fc.length(metric)?;
        for r in cfg.radii.values()? {
            let inv = tube_invariants(metric, fc, r, &cfg.quadrature.tube)?;
            let closed = match profile {
                Some(p) => Some(harmonic_closed_forms(p, r, l)?.invariants),
                None => None,
            };
            let lab = |q: &str| curve_label(i, curves.len(), q);
            let rel = |q: &str| Check::Rel(cfg.tolerance(q, 1e-3));
            let e = &inv.errors;
            ctx.push(
                Row::new(space, Some(r), lab("volume"), inv.volume, e.volume)
                    .against_opt(closed.as_ref().map(|c| c.volume), rel("volume")),
            );
            ctx.push(
                Row::new(space, Some(r), lab("area"), inv.area, e.area)
                    .against_opt(closed.as_ref().map(|c| c.area), rel("area")),
            );
            ctx.push(
                Row::new(
                    space,
                    Some(r),
                    lab("total_mean_curvature"),
                    inv.total_mean_curvature,
                    e.total_mean_curvature,
                )
                .against_opt(
                    closed.as_ref().map(|c| c.total_mean_curvature),
                    rel("total_mean_curvature"),
                ),
            );
            // C can vanish while its Gauss-equation terms do not; scale by their size.
            let scale = inv
                .total_scalar_curvature
                .abs()
                .max(inv.ambient_scalar.abs() + 2.0 * inv.normal_ricci.abs());
            let t_c = cfg.tolerance("total_scalar_curvature", 1e-3) * scale;
            ctx.push(
                Row::new(
                    space,
                    Some(r),
                    lab("total_scalar_curvature"),
                    inv.total_scalar_curvature,
                    e.total_scalar_curvature,
                )
                .against_opt(
                    closed.as_ref().map(|c| c.total_scalar_curvature),
                    Check::Abs(t_c),
                ),
            );
            ctx.push(
                Row::new(
                    space,
                    Some(r),
                    lab("normal_ricci"),
                    inv.normal_ricci,
                    e.normal_ricci,
                )
                .against_opt(closed.as_ref().map(|c| c.normal_ricci), rel("normal_ricci")),
            );
            if let (
                true,
                CurveSpec::Geodesic {
                    point, direction, ..
                },
            ) = (n >= 4, &specs[i])
            {
                let p = point.clone().unwrap_or_else(|| metric.center().to_vec());
                let d = direction.clone().unwrap_or_else(|| generic_direction(n));
                let u = TangentVector::new(metric, &p, &d)?.unit()?;
                let cd = curvature(metric, &p)?;
                let gv = scalar_curvature_expansion(n, r, l, cd.scalar, cd.ricci_of(&u.components));
                ctx.push(
                    Row::new(
                        space,
                        Some(r),
                        lab("gv_expansion"),
                        inv.total_scalar_curvature,
                        e.total_scalar_curvature,
                    )
                    .against(gv, Check::Rel(cfg.tolerance("gv_expansion", 1e-4))),
                );
            }
        }
    }
    Ok(())
}

fn steiner(ctx: &mut Ctx<'_>, metric: &ChartMetric, space: &str) -> Result<()> {
    let cfg = ctx.cfg;
    let deltas = if cfg.deltas.is_empty() {
        vec![0.02, 0.01]
    } else {
        cfg.deltas.clone()
    };
    let curves = framed_curves(cfg, metric)?;
    let t_c = ctx.tol("steiner_coefficient", 1e-3);
    let t_ratio = ctx.tol("residual_ratio", 4.0);
    for (i, fc) in curves.iter().enumerate() {
        for r in cfg.radii.values()? {
            let rep = steiner_check(metric, fc, r, &deltas, &cfg.quadrature.tube)?;
            for k in 0..3 {
                let q = curve_label(i, curves.len(), &format!("steiner_coefficient[{}]", k + 1));
                ctx.push(
                    Row::new(space, Some(r), q, rep.coefficients[k], 0.0)
                        .against(rep.fd_derivatives[k], Check::Rel(t_c)),
                );
            }
            for (d, res) in &rep.residuals {
                let q = curve_label(i, curves.len(), &format!("steiner_residual[delta={d}]"));
                ctx.push(Row::new(space, Some(r), q, *res, 0.0));
            }
            for (w, ratio) in rep.ratios.iter().enumerate() {
                let q = curve_label(i, curves.len(), &format!("residual_ratio[{w}]"));
                ctx.push(
                    Row::new(space, Some(r), q, *ratio, 0.0).against(16.0, Check::Abs(t_ratio)),
                );
            }
        }
    }
    Ok(())
}

fn transform_dims(cfg: &ExperimentConfig, spec: &SpaceSpec) -> Vec<usize> {
    if cfg.dims.is_empty() {
        vec![spec.dim()]
    } else {
        cfg.dims.clone()
    }
}

fn transform_direction(cfg: &ExperimentConfig, n: usize) -> Vec<f64> {
    let d = cfg
        .directions
        .iter()
        .find(|d| d.len() == n)
        .cloned()
        .unwrap_or_else(|| generic_direction(n));
    let nd = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.iter().map(|x| x / nd).collect()
}

fn transform_cosine(ctx: &mut Ctx<'_>, spec: &SpaceSpec) -> Result<()> {
    let cfg = ctx.cfg;
    let names: Vec<String> = if cfg.functions.is_empty() {
        functions::SPHERICAL_DEFAULT
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        cfg.functions.clone()
    };
    let t = ctx.tol("cosine", 1e-10);
    let t_h = ctx.tol("hemisphere", 1e-10);
    for n in transform_dims(cfg, spec) {
        let space = format!("R{n}");
        let rule = sphere_rule(cfg, n)?;
        let coarse = rule.coarser()?;
        let u = transform_direction(cfg, n);
        for name in &names {
            let f = functions::spherical(name, n)?;
            let c = cosine_transform(&f, &u, &rule)?;
            let err = match &coarse {
                Some(cr) => (c - cosine_transform(&f, &u, cr)?).abs(),
                None => 0.0,
            };
            let reference = match (name.as_str(), f.parity()) {
                ("one", _) => Some(2.0 * unit_ball_volume(n - 1)),
                (_, Some(crate::sphere::Parity::Odd)) => Some(0.0),
                _ => None,
            };
            ctx.push(
                Row::new(&space, None, format!("cosine[{name}]"), c, err)
                    .against_opt(reference, Check::Abs(t)),
            );
            if f.parity() == Some(crate::sphere::Parity::Even) {
                let h = hemisphere_moment(&f, &u, &rule)?;
                ctx.push(
                    Row::new(&space, None, format!("hemisphere[{name}]"), h, err / 2.0)
                        .against(c / 2.0, Check::Abs(t_h)),
                );
            }
        }
    }
    Ok(())
}

fn stiefel_fubini(ctx: &mut Ctx<'_>, spec: &SpaceSpec) -> Result<()> {
    let cfg = ctx.cfg;
    let names: Vec<String> = if cfg.functions.is_empty() {
        functions::PAIR_DEFAULT
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        cfg.functions.clone()
    };
    let t_one = ctx.tol("fubini_one", 1e-10);
    let t_rel = ctx.tol("fubini", 1e-8);
    for n in transform_dims(cfg, spec) {
        if n < 3 {
            return Err(Error::Config("the Stiefel check needs n ≥ 3".into()));
        }
        let space = format!("R{n}");
        let rule = sphere_rule(cfg, n)?;
        for name in &names {
            let f = functions::pair(name)?;
            let (lhs, rhs) = stiefel_fubini_check(f, &rule, cfg.quadrature.inner_level)?;
            if name == "one" {
                let exact =
                    n as f64 * (n - 1) as f64 * unit_ball_volume(n) * unit_ball_volume(n - 1);
                ctx.push(
                    Row::new(&space, None, "fubini_lhs[one]", lhs, 0.0)
                        .against(exact, Check::Abs(t_one)),
                );
                ctx.push(
                    Row::new(&space, None, "fubini_rhs[one]", rhs, 0.0)
                        .against(exact, Check::Abs(t_one)),
                );
            } else {
                ctx.push(
                    Row::new(&space, None, format!("fubini[{name}]"), lhs, 0.0)
                        .against(rhs, Check::Rel(t_rel)),
                );
            }
        }
    }
    Ok(())
}
