use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::reflector_to;
use crate::numerics::{pairwise_sum, unit_sphere_area};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Gauss–Gegenbauer latitudes over a uniform circle; exact to degree `2L+1`.
    #[default]
    Product,
    /// Product rule split at the equator of a pole; the two open hemispheres
    /// carry mirrored node sets and no node lies on the equator.
    Hemispherical,
    /// Normalized Halton points with equal weights.
    LowDiscrepancy,
}

/// Nodes and positive weights on the unit sphere `𝕊^{n−1} ⊂ ℝⁿ`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    antipodal: bool,
    level: usize,
    kind: RuleKind,
    pole: Option<Vec<f64>>,
    side: Vec<i8>,
}

use crate::numerics::gauss::{gauss_jacobi as jacobi, gauss_legendre as legendre};

/// Smooth product rule on `𝕊^{m−1}` as (node, weight) pairs.
fn product_nodes(m: usize, level: usize) -> Vec<(Vec<f64>, f64)> {
    match m {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let count = 2 * level + 2;
            (0..count)
                .map(|j| {
                    let phi = (j as f64 + 0.5) * 2.0 * PI / count as f64;
                    (vec![phi.cos(), phi.sin()], 2.0 * PI / count as f64)
                })
                .collect()
        }
        _ => {
            let alpha = (m as f64 - 3.0) / 2.0;
            let lower = product_nodes(m - 1, level);
            let mut out = Vec::with_capacity(lower.len() * (level + 1));
            for (t, w) in jacobi(level + 1, alpha, alpha) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (v, wl) in &lower {
                    let mut node = Vec::with_capacity(m);
                    node.push(t);
                    node.extend(v.iter().map(|c| s * c));
                    out.push((node, w * wl));
                }
            }
            out
        }
    }
}

/// Upper-hemisphere nodes (first coordinate > 0) of the split rule.
fn upper_hemisphere_nodes(m: usize, level: usize) -> Vec<(Vec<f64>, f64)> {
    match m {
        1 => vec![(vec![1.0], 1.0)],
        2 => {
            let k = 2 * level + 10;
            legendre(k)
                .into_iter()
                .map(|(x, w)| {
                    let phi = 0.5 * PI * x;
                    (vec![phi.cos(), phi.sin()], 0.5 * PI * w)
                })
                .collect()
        }
        _ => {
            // ∫₀¹ f(t)(1−t²)^α dt with weight (1−t)^α handled by Jacobi on [0, 1].
            let alpha = (m as f64 - 3.0) / 2.0;
            let extra = if alpha.fract() == 0.0 {
                (alpha / 2.0).ceil() as usize
            } else {
                8
            };
            let k = level + 1 + extra;
            let lower = product_nodes(m - 1, level);
            let scale = 2f64.powf(-(alpha + 1.0));
            let mut out = Vec::new();
            for (x, w) in jacobi(k, alpha, 0.0) {
                let t = 0.5 * (x + 1.0);
                let wt = w * scale * (1.0 + t).powf(alpha);
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (v, wl) in &lower {
                    let mut node = Vec::with_capacity(m);
                    node.push(t);
                    node.extend(v.iter().map(|c| s * c));
                    out.push((node, wt * wl));
                }
            }
            out
        }
    }
}

/// Van der Corput radical inverse.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn low_discrepancy_nodes(m: usize, count: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let pairs = m.div_ceil(2);
    if 2 * pairs > PRIMES.len() {
        return Err(Error::Unsupported(format!(
            "low-discrepancy rules up to dimension {}",
            PRIMES.len()
        )));
    }
    let w = unit_sphere_area(m) / count as f64;
    let mut out = Vec::with_capacity(count);
    for i in 1..=count as u64 {
        let mut g = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = radical_inverse(i, PRIMES[2 * p]).max(1e-300);
            let u2 = radical_inverse(i, PRIMES[2 * p + 1]);
            let r = (-2.0 * u1.ln()).sqrt();
            g.push(r * (2.0 * PI * u2).cos());
            g.push(r * (2.0 * PI * u2).sin());
        }
        g.truncate(m);
        let nrm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push((g.iter().map(|x| x / nrm).collect(), w));
    }
    Ok(out)
}

/// Builds a rule on `𝕊^{n−1}`. For the low-discrepancy kind, `level` sets the
/// point count `64·2^level`.
pub fn build_rule(n: usize, level: usize, kind: RuleKind) -> Result<SphereRule> {
    if n < 1 {
        return Err(Error::Unsupported("sphere rules need n ≥ 1".into()));
    }
    let rule = match kind {
        RuleKind::Product => {
            SphereRule::from_pairs(n, level, kind, product_nodes(n, level), true, None)
        }
        RuleKind::Hemispherical => {
            let upper = upper_hemisphere_nodes(n, level);
            let mut pairs = upper.clone();
            pairs.extend(
                upper
                    .into_iter()
                    .map(|(v, w)| (v.iter().map(|c| -c).collect(), w)),
            );
            let mut pole = vec![0.0; n];
            pole[0] = 1.0;
            SphereRule::from_pairs(n, level, kind, pairs, true, Some(pole))
        }
        RuleKind::LowDiscrepancy => {
            if level > 16 {
                return Err(Error::Unsupported("low-discrepancy level above 16".into()));
            }
            SphereRule::from_pairs(
                n,
                level,
                kind,
                low_discrepancy_nodes(n, 64 << level)?,
                false,
                None,
            )
        }
    };
    Ok(rule)
}

/// Rule on the great subsphere `S⁰(u) = 𝕊^{n−1} ∩ u^⊥`, built in a basis of `u^⊥`
/// completed from `u` with largest-pivot-first Gram–Schmidt.
pub fn great_subsphere(u: &[f64], level: usize, kind: RuleKind) -> Result<SphereRule> {
    let n = u.len();
    if n < 2 {
        return Err(Error::Unsupported("great subspheres need n ≥ 2".into()));
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let g = nalgebra::DMatrix::identity(n, n);
    let unit: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let basis = crate::numerics::linalg::complete_basis(&g, &[unit]);
    let inner = build_rule(n - 1, level, kind)?;
    let pairs = (0..inner.len())
        .map(|i| {
            let w = inner.node(i);
            let mut v = vec![0.0; n];
            for (c, b) in w.iter().zip(&basis[1..]) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            (v, inner.weights[i])
        })
        .collect();
    Ok(SphereRule::from_pairs(
        n,
        level,
        kind,
        pairs,
        inner.antipodal,
        None,
    ))
}

impl SphereRule {
    fn from_pairs(
        dim: usize,
        level: usize,
        kind: RuleKind,
        pairs: Vec<(Vec<f64>, f64)>,
        antipodal: bool,
        pole: Option<Vec<f64>>,
    ) -> Self {
        let mut nodes = Vec::with_capacity(pairs.len() * dim);
        let mut weights = Vec::with_capacity(pairs.len());
        let mut side = Vec::new();
        for (v, w) in pairs {
            if let Some(p) = &pole {
                let d: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
                side.push(if d > 0.0 {
                    1
                } else if d < 0.0 {
                    -1
                } else {
                    0
                });
            }
            nodes.extend(v);
            weights.push(w);
        }
        Self {
            dim,
            nodes,
            weights,
            antipodal,
            level,
            kind,
            pole,
            side,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn antipodal(&self) -> bool {
        self.antipodal
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn pole(&self) -> Option<&[f64]> {
        self.pole.as_deref()
    }

    /// `+1`/`−1` for the hemisphere of node `i` relative to the pole; `0` without a pole.
    pub fn side(&self, i: usize) -> i8 {
        self.side.get(i).copied().unwrap_or(0)
    }

    /// `Σ w_i f(v_i)` with deterministic pairwise summation.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let vals: Vec<f64> = (0..self.len())
            .map(|i| self.weights[i] * f(self.node(i)))
            .collect();
        pairwise_sum(&vals)
    }

    /// The same rule rotated by the reflection taking the pole (or `e₁`) to `u`.
    pub fn oriented(&self, u: &[f64]) -> Result<Self> {
        if u.len() != self.dim {
            return Err(Error::Parameter(
                "orientation vector dimension mismatch".into(),
            ));
        }
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let h = reflector_to(&unit);
        let mut out = self.clone();
        for i in 0..self.len() {
            let v = self.node(i);
            for r in 0..self.dim {
                let mut s = 0.0;
                for c in 0..self.dim {
                    s += h[(r, c)] * v[c];
                }
                out.nodes[i * self.dim + r] = s;
            }
        }
        if out.pole.is_some() {
            out.pole = Some(unit);
        }
        Ok(out)
    }

    /// The next-coarser rule of the same kind, for error estimation.
    pub fn coarser(&self) -> Result<Option<Self>> {
        if self.level == 0 {
            return Ok(None);
        }
        let mut c = build_rule(self.dim, self.level - 1, self.kind)?;
        if let Some(p) = &self.pole {
            c = c.oriented(p)?;
        }
        Ok(Some(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::unit_ball_volume;

    /// `∫_{𝕊^{n−1}} Π v_i^{a_i} dv = 2 Π Γ((a_i+1)/2) / Γ((|a|+n)/2)` for even exponents.
    fn monomial_oracle(exps: &[u32]) -> f64 {
        if exps.iter().any(|e| e % 2 == 1) {
            return 0.0;
        }
        fn gamma_half(k: u32) -> f64 {
            // Γ(k/2)
            if k % 2 == 0 {
                (1..k / 2).map(|i| i as f64).product()
            } else {
                let mut g = PI.sqrt();
                let mut a = 0.5;
                while a < k as f64 / 2.0 - 0.25 {
                    g *= a;
                    a += 1.0;
                }
                g
            }
        }
        let num: f64 = exps.iter().map(|e| gamma_half(e + 1)).product();
        let tot: u32 = exps.iter().sum::<u32>() + exps.len() as u32;
        2.0 * num / gamma_half(tot)
    }

    fn all_exponents(n: usize, max_deg: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = vec![];
            for e in &out {
                let used: u32 = e.iter().sum();
                for k in 0..=(max_deg - used) {
                    let mut f = e.clone();
                    f.push(k);
                    next.push(f);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn weights_sum_to_area() {
        for n in 2..=6 {
            for kind in [
                RuleKind::Product,
                RuleKind::Hemispherical,
                RuleKind::LowDiscrepancy,
            ] {
                let r = build_rule(n, 3, kind).unwrap();
                let s = pairwise_sum(r.weights());
                assert!(
                    (s / unit_sphere_area(n) - 1.0).abs() < 1e-12,
                    "n={n} {kind:?}"
                );
                assert!(r.weights().iter().all(|w| *w > 0.0));
            }
        }
        let r = build_rule(3, 2, RuleKind::Product).unwrap();
        assert!((pairwise_sum(r.weights()) - 4.0 * PI).abs() < 1e-12);
        let r = build_rule(4, 2, RuleKind::Product).unwrap();
        assert!((pairwise_sum(r.weights()) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn second_moment_in_three_dimensions() {
        let r = build_rule(3, 1, RuleKind::Product).unwrap();
        let v = r.integrate(|v| v[0] * v[0]);
        assert!((v - unit_ball_volume(3)).abs() < 1e-13);
    }

    #[test]
    fn monomial_exactness() {
        for n in 2..=5 {
            for level in [1usize, 3, 5] {
                let deg = (2 * level + 1) as u32;
                for kind in [RuleKind::Product, RuleKind::Hemispherical] {
                    let r = build_rule(n, level, kind).unwrap();
                    for e in all_exponents(n, deg) {
                        let exact = monomial_oracle(&e);
                        let q = r.integrate(|v| {
                            v.iter().zip(&e).map(|(x, k)| x.powi(*k as i32)).product()
                        });
                        assert!(
                            (q - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                            "n={n} L={level} {kind:?} {e:?}: {q} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn antipodal_symmetry_and_hemisphere_partition() {
        let r = build_rule(4, 2, RuleKind::Hemispherical)
            .unwrap()
            .oriented(&[0.3, -0.2, 0.5, 0.1])
            .unwrap();
        let pole = r.pole().unwrap().to_vec();
        let half = r.len() / 2;
        for i in 0..half {
            let a = r.node(i);
            let b = r.node(i + half);
            assert!(a.iter().zip(b).all(|(x, y)| (x + y).abs() < 1e-15));
            assert_eq!(r.weight(i), r.weight(i + half));
            assert_eq!(r.side(i), 1);
            assert_eq!(r.side(i + half), -1);
            let d: f64 = a.iter().zip(&pole).map(|(x, y)| x * y).sum();
            assert!(d > 0.0);
        }
    }

    #[test]
    fn great_subsphere_integrates_constants() {
        for n in 3..=5 {
            let u: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
            let r = great_subsphere(&u, 2, RuleKind::Product).unwrap();
            let area = (n - 1) as f64 * unit_ball_volume(n - 1);
            assert!((pairwise_sum(r.weights()) - area).abs() < 1e-12 * area);
            for i in 0..r.len() {
                let d: f64 = r.node(i).iter().zip(&u).map(|(a, b)| a * b).sum();
                assert!(d.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn low_discrepancy_converges() {
        let exact = monomial_oracle(&[2, 0, 2, 0, 0, 0, 0]);
        let coarse = build_rule(7, 2, RuleKind::LowDiscrepancy).unwrap();
        let fine = build_rule(7, 8, RuleKind::LowDiscrepancy).unwrap();
        let f = |v: &[f64]| v[0] * v[0] * v[2] * v[2];
        let ec = (coarse.integrate(f) - exact).abs();
        let ef = (fine.integrate(f) - exact).abs();
        assert!(ef < ec && ef < 1e-2 * exact, "{ec} {ef}");
    }
}
