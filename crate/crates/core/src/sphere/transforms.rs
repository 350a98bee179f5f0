use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rule::{great_subsphere, RuleKind, SphereRule};
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A function on the unit sphere of a fixed `ℝⁿ`.
pub struct SphericalFunction<'a> {
    dim: usize,
    eval: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    parity: Option<Parity>,
}

impl<'a> SphericalFunction<'a> {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Sync + 'a) -> Self {
        Self {
            dim,
            eval: Box::new(f),
            parity: None,
        }
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = Some(parity);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        (self.eval)(v)
    }

    /// Checks the parity tag on `samples` random antipodal pairs; returns the largest defect.
    pub fn verify_parity(&self, samples: usize, seed: u64) -> Result<f64> {
        let Some(parity) = self.parity else {
            return Ok(0.0);
        };
        let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let w: Vec<f64> = v.iter().map(|x| -x).collect();
            worst = worst.max((self.eval(&w) - sign * self.eval(&v)).abs());
        }
        if worst > 1e-10 {
            return Err(Error::Parameter(format!(
                "parity tag violated by {worst:e}"
            )));
        }
        Ok(worst)
    }
}

fn aligned(rule: &SphereRule, u: &[f64], f_dim: usize) -> Result<SphereRule> {
    if rule.dim() != f_dim || u.len() != f_dim {
        return Err(Error::Parameter(
            "rule, function and direction dimensions differ".into(),
        ));
    }
    if (dot(u, u).sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter("direction must be a unit vector".into()));
    }
    if rule.kind() == RuleKind::Hemispherical {
        rule.oriented(u)
    } else {
        Ok(rule.clone())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `𝒞(f)(u) = ∫ |⟨u, v⟩| f(v) dv`.
///
/// Hemispherical rules are re-aimed at `u` first so the kink of `|⟨u,v⟩|`
/// falls on the rule's equator.
pub fn cosine_transform(f: &SphericalFunction<'_>, u: &[f64], rule: &SphereRule) -> Result<f64> {
    let r = aligned(rule, u, f.dim())?;
    Ok(r.integrate(|v| dot(u, v).abs() * f.eval(v)))
}

/// `∫_{S⁺(u)} ⟨u, v⟩ f(v) dv`.
pub fn hemisphere_moment(f: &SphericalFunction<'_>, u: &[f64], rule: &SphereRule) -> Result<f64> {
    let r = aligned(rule, u, f.dim())?;
    Ok(r.integrate(|v| dot(u, v).max(0.0) * f.eval(v)))
}

/// Both iterated integrals `∫_{𝕊^{n−1}} ∫_{S⁰(u)} f(u, v) dv du` and
/// `∫_{𝕊^{n−1}} ∫_{S⁰(v)} f(u, v) du dv` over orthonormal 2-frames.
pub fn stiefel_fubini_check(
    f: impl Fn(&[f64], &[f64]) -> f64,
    rule: &SphereRule,
    inner_level: usize,
) -> Result<(f64, f64)> {
    let mut lhs = Vec::with_capacity(rule.len());
    let mut rhs = Vec::with_capacity(rule.len());
    for i in 0..rule.len() {
        let x = rule.node(i);
        let sub = great_subsphere(x, inner_level, RuleKind::Product)?;
        lhs.push(rule.weight(i) * sub.integrate(|v| f(x, v)));
        rhs.push(rule.weight(i) * sub.integrate(|u| f(u, x)));
    }
    Ok((pairwise_sum(&lhs), pairwise_sum(&rhs)))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::numerics::unit_ball_volume;
    use crate::sphere::build_rule;

    #[test]
    fn cosine_transform_of_constant() {
        let one = SphericalFunction::new(3, |_| 1.0).with_parity(Parity::Even);
        let rule = build_rule(3, 4, RuleKind::Hemispherical).unwrap();
        let u = [2.0 / 7.0, 3.0 / 7.0, -6.0 / 7.0];
        let c = cosine_transform(&one, &u, &rule).unwrap();
        assert!((c - 2.0 * PI).abs() < 1e-12);
        assert!(cosine_transform(&one, &[0.2, 0.3, -0.9], &rule).is_err());
        let h = hemisphere_moment(&one, &u, &rule).unwrap();
        assert!((h - unit_ball_volume(2)).abs() < 1e-12);
    }

    #[test]
    fn cosine_of_squared_projection() {
        // 2π ∫₋₁¹ |c| c² dc = π.
        let u = [0.0, 0.6, 0.8];
        let f = SphericalFunction::new(3, |v| (0.6 * v[1] + 0.8 * v[2]).powi(2));
        let rule = build_rule(3, 3, RuleKind::Hemispherical).unwrap();
        assert!((cosine_transform(&f, &u, &rule).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn odd_functions_are_annihilated() {
        let f = SphericalFunction::new(3, |v| v[0].powi(3)).with_parity(Parity::Odd);
        f.verify_parity(32, 7).unwrap();
        let rule = build_rule(3, 3, RuleKind::Hemispherical).unwrap();
        assert!(
            cosine_transform(&f, &[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0], &rule)
                .unwrap()
                .abs()
                < 1e-13
        );
    }

    #[test]
    fn wrong_parity_tag_is_caught() {
        let f = SphericalFunction::new(3, |v| v[0] + 1.0).with_parity(Parity::Odd);
        assert!(f.verify_parity(8, 1).is_err());
    }

    #[test]
    fn fubini_constant_is_eight_pi_squared() {
        let rule = build_rule(3, 2, RuleKind::Product).unwrap();
        let (l, r) = stiefel_fubini_check(|_, _| 1.0, &rule, 2).unwrap();
        assert!((l - 8.0 * PI * PI).abs() < 1e-10);
        assert!((r - 8.0 * PI * PI).abs() < 1e-10);
    }
}
