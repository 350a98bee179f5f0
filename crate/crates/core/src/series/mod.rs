//! Taylor coefficients `θ(ru) = Σ a_i(u) r^i` by least squares, the parity
//! identity `a_i(−u) = (−1)^i a_i(u)`, harmonicity up to a given order and the
//! odd-order relation obtained from `θ(ru) = θ(−r γ_u′(r))`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::theta_profile;
use crate::error::{Error, Result};
use crate::manifold::{curvature, integrate_geodesic_with, ChartMetric, TangentVector};
use crate::numerics::fd::{central_offsets, fornberg_weights};
use crate::numerics::OdeOptions;

/// Largest supported fit order.
pub const MAX_ORDER: usize = 8;
/// Largest accepted condition number of the scaled design matrix.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            r_min: 0.05,
            r_max: 0.5,
        }
    }
}

impl FitWindow {
    /// The default window shrunk by `1/√κ` when the largest Ricci eigenvalue
    /// per dimension `κ` at `p` exceeds 1.
    pub fn for_point(metric: &ChartMetric, p: &[f64]) -> Result<Self> {
        let cd = curvature(metric, p)?;
        let k = cd
            .ricci_eigenvalues()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()))
            / (metric.dim() - 1) as f64;
        let s = 1.0 / k.max(1.0).sqrt();
        let d = Self::default();
        Ok(Self {
            r_min: d.r_min * s,
            r_max: d.r_max * s,
        })
    }
}

/// Fitted coefficients `a_0 … a_K` of `θ(ru)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFit {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// One-sigma errors from the residual covariance with an ODE-noise floor.
    pub errors: Vec<f64>,
    pub window: FitWindow,
    pub condition: f64,
    pub residual_rms: f64,
}

/// `m` Chebyshev nodes on `[a, b]`, ascending.
fn chebyshev(a: f64, b: f64, m: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..m)
        .map(|k| {
            0.5 * (a + b)
                + 0.5 * (b - a) * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos()
        })
        .collect();
    x.sort_by(f64::total_cmp);
    x
}

/// Least-squares fit of `θ(ru)` on Chebyshev radii of `±window`.
///
/// Negative radii are sampled along `−u`, using `θ(ru) = θ((−r)(−u))`.
pub fn fit_coefficients_with(
    metric: &ChartMetric,
    u: &TangentVector,
    order: usize,
    window: FitWindow,
    ode: &OdeOptions,
) -> Result<CoefficientFit> {
    if order > MAX_ORDER {
        return Err(Error::Parameter(format!(
            "fit order {order} above the cap {MAX_ORDER}"
        )));
    }
    if !(window.r_min > 0.0 && window.r_max > window.r_min) {
        return Err(Error::Parameter(
            "fit window must satisfy 0 < r_min < r_max".into(),
        ));
    }
    let u = u.unit()?;
    let m = 2 * order + 4;
    let radii = chebyshev(window.r_min, window.r_max, m);
    let plus = theta_profile(metric, &u, &radii, ode)?;
    let minus = theta_profile(metric, &u.scaled(-1.0), &radii, ode)?;
    let rows: Vec<(f64, f64)> = radii
        .iter()
        .map(|r| -r)
        .zip(minus)
        .rev()
        .chain(radii.iter().copied().zip(plus))
        .collect();

    let k = order + 1;
    let s = window.r_max;
    let design = DMatrix::from_fn(rows.len(), k, |i, j| (rows[i].0 / s).powi(j as i32));
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let c = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Algebra(e.to_string()))?;
    let resid = &y - &design * &c;
    let dof = (rows.len() - k).max(1) as f64;
    let sigma2 = resid.norm_squared() / dof;
    let vt = svd.v_t.as_ref().expect("requested V");
    let noise = 10.0 * ode.rtol;
    let errors = (0..k)
        .map(|j| {
            // (AᵀA)⁻¹_jj = Σ_l V_jl² / σ_l².
            let diag: f64 = (0..k)
                .map(|l| vt[(l, j)].powi(2) / svd.singular_values[l].powi(2))
                .sum();
            ((sigma2 + noise * noise) * diag).sqrt() / s.powi(j as i32)
        })
        .collect();
    Ok(CoefficientFit {
        point: u.point.clone(),
        direction: u.components.clone(),
        coefficients: (0..k).map(|j| c[j] / s.powi(j as i32)).collect(),
        errors,
        window,
        condition,
        residual_rms: (resid.norm_squared() / rows.len() as f64).sqrt(),
    })
}

/// [`fit_coefficients_with`] with default ODE tolerances.
pub fn fit_coefficients(
    metric: &ChartMetric,
    u: &TangentVector,
    order: usize,
    window: FitWindow,
) -> Result<CoefficientFit> {
    fit_coefficients_with(metric, u, order, window, &OdeOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityDefect {
    pub order: usize,
    /// `|a_i(−u) − (−1)^i a_i(u)|`.
    pub defect: f64,
    pub error: f64,
}

pub fn parity_check(
    fit_u: &CoefficientFit,
    fit_minus_u: &CoefficientFit,
) -> Result<Vec<ParityDefect>> {
    if fit_u.coefficients.len() != fit_minus_u.coefficients.len()
        || fit_u.window != fit_minus_u.window
    {
        return Err(Error::Parameter(
            "parity fits must share order and window".into(),
        ));
    }
    Ok((0..fit_u.coefficients.len())
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            ParityDefect {
                order: i,
                defect: (fit_minus_u.coefficients[i] - sign * fit_u.coefficients[i]).abs(),
                error: fit_u.errors[i].hypot(fit_minus_u.errors[i]),
            }
        })
        .collect())
}

/// Base point and direction of one coefficient sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

/// `count` directions per point drawn from a seeded generator, Euclidean-normal in coordinates.
pub fn sample_directions(points: &[Vec<f64>], count: usize, seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(points.len() * count);
    for p in points {
        for _ in 0..count {
            let d: Vec<f64> = loop {
                let d: Vec<f64> = (0..p.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                if d.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
                    break d;
                }
            };
            out.push(SamplePoint {
                point: p.clone(),
                direction: d,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVariation {
    pub order: usize,
    pub mean: f64,
    /// `max |a_i − mean a_i|` over samples.
    pub variation: f64,
    /// Three times the largest one-sigma error among the samples.
    pub error_bar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    pub orders: Vec<OrderVariation>,
    /// Largest `k` such that every order `≤ k` passes.
    pub passes_up_to: Option<usize>,
    /// First order whose variation exceeds its error bar.
    pub first_failure: Option<usize>,
    pub fits: Vec<CoefficientFit>,
}

/// Whether `a_0 … a_K` are constant over the sample set, fitting to order `min(8, K+2)`.
pub fn harmonic_up_to_order(
    metric: &ChartMetric,
    order: usize,
    samples: &[SamplePoint],
    window: Option<FitWindow>,
    ode: &OdeOptions,
) -> Result<HarmonicityReport> {
    if order > MAX_ORDER {
        return Err(Error::Parameter(format!(
            "order {order} above the cap {MAX_ORDER}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Parameter("harmonicity test needs samples".into()));
    }
    let fit_order = (order + 2).min(MAX_ORDER);
    let fits: Vec<Result<CoefficientFit>> = samples
        .par_iter()
        .map(|s| {
            let u = TangentVector::new(metric, &s.point, &s.direction)?;
            let w = match window {
                Some(w) => w,
                None => FitWindow::for_point(metric, &s.point)?,
            };
            fit_coefficients_with(metric, &u, fit_order, w, ode)
        })
        .collect();
    let fits: Vec<CoefficientFit> = fits.into_iter().collect::<Result<_>>()?;
    let orders: Vec<OrderVariation> = (0..=order)
        .map(|i| {
            let vals: Vec<f64> = fits.iter().map(|f| f.coefficients[i]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let variation = vals.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
            let error_bar = 3.0 * fits.iter().fold(0.0f64, |m, f| m.max(f.errors[i]));
            OrderVariation {
                order: i,
                mean,
                variation,
                error_bar,
            }
        })
        .collect();
    let first_failure = orders
        .iter()
        .find(|o| o.variation > o.error_bar)
        .map(|o| o.order);
    let passes_up_to = match first_failure {
        Some(0) => None,
        Some(k) => Some(k - 1),
        None => Some(order),
    };
    Ok(HarmonicityReport {
        orders,
        passes_up_to,
        first_failure,
        fits,
    })
}

/// Both sides of `2a_{2k+1}(u) = Σ_{j=1}^{2k+1} (−1)^{2k+1−j} α_{2k+1−j}^{(j)}(0)/j!`
/// with `α_i(s) = a_i(γ_u′(s))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanheckeCheck {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// `|lhs − rhs|` within three combined standard errors.
    pub agrees: bool,
    /// Each side's error bar exceeds its magnitude, so agreement says nothing.
    pub inconclusive: bool,
}

/// Stencil half-width and spacing along the geodesic.
const VANHECKE_HALF: usize = 4;
const VANHECKE_STEP: f64 = 0.05;

pub fn vanhecke_relation_check(
    metric: &ChartMetric,
    u: &TangentVector,
    k: usize,
    ode: &OdeOptions,
) -> Result<VanheckeCheck> {
    if k > 2 {
        return Err(Error::Parameter(
            "the odd-order relation is checked for k ≤ 2".into(),
        ));
    }
    let odd = 2 * k + 1;
    let fit_order = (odd + 3).min(MAX_ORDER);
    let u = u.unit()?;
    let window = FitWindow::for_point(metric, &u.point)?;
    let steps: Vec<f64> = (1..=VANHECKE_HALF)
        .map(|j| j as f64 * VANHECKE_STEP)
        .collect();
    // Tangent vectors γ_u′(s) for s = −H·h … H·h; the backward half runs along −u.
    let mut forward = Vec::new();
    integrate_geodesic_with(metric, &u.point, &u.components, &steps, ode, |st| {
        forward.push(TangentVector::new(metric, &st.position, &st.velocity)?);
        Ok(())
    })?;
    let minus: Vec<f64> = u.components.iter().map(|c| -c).collect();
    let mut backward = Vec::new();
    integrate_geodesic_with(metric, &u.point, &minus, &steps, ode, |st| {
        let v: Vec<f64> = st.velocity.iter().map(|c| -c).collect();
        backward.push(TangentVector::new(metric, &st.position, &v)?);
        Ok(())
    })?;
    let mut stencil: Vec<TangentVector> = backward.into_iter().rev().collect();
    stencil.push(u.clone());
    stencil.extend(forward);
    let fits: Vec<Result<CoefficientFit>> = stencil
        .par_iter()
        .map(|v| fit_coefficients_with(metric, v, fit_order, window, ode))
        .collect();
    let fits: Vec<CoefficientFit> = fits.into_iter().collect::<Result<_>>()?;
    let centre = &fits[VANHECKE_HALF];
    let offsets = central_offsets(VANHECKE_HALF);
    let mut rhs = 0.0;
    let mut rhs_var = 0.0;
    let mut factorial = 1.0;
    for j in 1..=odd {
        factorial *= j as f64;
        let i = odd - j;
        let w = fornberg_weights(&offsets, j);
        let scale = VANHECKE_STEP.powi(j as i32);
        let sign = if (odd - j) % 2 == 0 { 1.0 } else { -1.0 };
        let d: f64 = w
            .iter()
            .zip(&fits)
            .map(|(w, f)| w * f.coefficients[i])
            .sum::<f64>()
            / scale;
        let var: f64 = w
            .iter()
            .zip(&fits)
            .map(|(w, f)| (w * f.errors[i]).powi(2))
            .sum::<f64>()
            / (scale * scale);
        rhs += sign * d / factorial;
        rhs_var += var / (factorial * factorial);
    }
    let lhs = 2.0 * centre.coefficients[odd];
    let lhs_error = 2.0 * centre.errors[odd];
    let rhs_error = rhs_var.sqrt();
    Ok(VanheckeCheck {
        k,
        lhs,
        rhs,
        lhs_error,
        rhs_error,
        agrees: (lhs - rhs).abs() <= 3.0 * lhs_error.hypot(rhs_error),
        inconclusive: lhs_error > lhs.abs() && rhs_error > rhs.abs(),
    })
}
