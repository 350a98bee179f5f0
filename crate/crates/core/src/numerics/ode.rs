//! Dormand–Prince 5(4) integrator with error control and exact output stops.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step relative to the span of the integration.
    pub min_step_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            min_step_rel: 1e-13,
            max_steps: 200_000,
        }
    }
}

impl OdeOptions {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self.atol = rtol * 1e-2;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` through every entry of `stops`.
///
/// `stops` must be monotone in one direction away from `t0` (values equal to
/// `t0` are allowed). The observer sees the state exactly at each stop. A
/// failing right-hand side (e.g. leaving the chart) triggers step reduction;
/// persistent failure becomes an escape error at the last accepted time.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    stops: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut stats = OdeStats::default();
    let Some(&t_end) = stops.last() else {
        return Ok(stats);
    };
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    for w in stops.windows(2) {
        if (w[1] - w[0]) * dir < 0.0 {
            return Err(Error::Parameter(
                "integration stops must be monotone".into(),
            ));
        }
    }
    if (stops[0] - t0) * dir < 0.0 {
        return Err(Error::Parameter(
            "integration stops must lie ahead of the start".into(),
        ));
    }
    let span = (t_end - t0).abs();
    let h_min = opts.min_step_rel * span.max(1e-300);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];

    f(t, &y, &mut k[0])?;
    stats.evaluations += 1;

    let mut next_stop = 0;
    while next_stop < stops.len() && stops[next_stop] == t0 {
        observe(next_stop, t, &y)?;
        next_stop += 1;
    }
    if next_stop == stops.len() {
        return Ok(stats);
    }

    let mut h = initial_step(&mut f, t, &y, &k[0], dir, span, opts, &mut stats)?;
    let mut fsal_valid = true;

    while next_stop < stops.len() {
        if stats.accepted + stats.rejected > opts.max_steps {
            return Err(Error::Stiffness { t, step: h });
        }
        let target = stops[next_stop];
        let remaining = (target - t).abs();
        let mut hit_stop = false;
        if h >= remaining {
            h = remaining;
            hit_stop = true;
        } else if h > 0.5 * remaining && h < remaining {
            // Avoid a sliver step just before the stop.
            h = 0.5 * remaining;
        }
        if !fsal_valid {
            f(t, &y, &mut k[0])?;
            stats.evaluations += 1;
            fsal_valid = true;
        }
        let hs = h * dir;
        match stages(&mut f, t, &y, hs, &mut k, &mut ytmp, &mut ynew) {
            Ok(()) => {
                stats.evaluations += 6;
            }
            Err(e) if e.is_domain_like() => {
                stats.rejected += 1;
                h *= 0.25;
                if h < h_min {
                    return Err(Error::Escape { t });
                }
                continue;
            }
            Err(e) => return Err(e),
        }
        let mut err_sq = 0.0;
        for i in 0..dim {
            let ei = hs
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err_sq += (ei / sc) * (ei / sc);
        }
        let err = (err_sq / dim.max(1) as f64).sqrt();
        if err <= 1.0 {
            stats.accepted += 1;
            t = if hit_stop { target } else { t + hs };
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            if hit_stop {
                while next_stop < stops.len() && stops[next_stop] == target {
                    observe(next_stop, t, &y)?;
                    next_stop += 1;
                }
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return Err(Error::Stiffness { t, step: h });
            }
        }
    }
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn stages<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    ytmp: &mut [f64],
    ynew: &mut [f64],
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    for i in 0..n {
        ytmp[i] = y[i] + h * A21 * k[0][i];
    }
    f(t + C2 * h, ytmp, &mut k[1])?;
    for i in 0..n {
        ytmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
    }
    f(t + C3 * h, ytmp, &mut k[2])?;
    for i in 0..n {
        ytmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
    }
    f(t + C4 * h, ytmp, &mut k[3])?;
    for i in 0..n {
        ytmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
    }
    f(t + C5 * h, ytmp, &mut k[4])?;
    for i in 0..n {
        ytmp[i] = y[i]
            + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
    }
    f(t + h, ytmp, &mut k[5])?;
    for i in 0..n {
        ynew[i] =
            y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
    }
    f(t + h, ynew, &mut k[6])?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    span: f64,
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len().max(1) as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (fi / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span);
    let y1: Vec<f64> = y
        .iter()
        .zip(f0)
        .map(|(yi, fi)| yi + dir * h0 * fi)
        .collect();
    let mut f1 = vec![0.0; y.len()];
    if f(t + dir * h0, &y1, &mut f1).is_err() {
        return Ok((h0 * 0.01).max(span * 1e-10));
    }
    stats.evaluations += 1;
    let mut d2 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d2 += ((f1[i] - f0[i]) / sc).powi(2);
    }
    let d2 = (d2 / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}
