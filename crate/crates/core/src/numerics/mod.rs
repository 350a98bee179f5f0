//! Numerical building blocks shared by the geometry modules.

pub mod fd;
pub mod gauss;
pub mod hyperdual;
pub mod jet;
pub mod linalg;
pub mod ode;
pub mod par;
pub mod sum;

pub use hyperdual::{HyperDual, Real};
pub use jet::Jet;
pub use ode::{OdeOptions, OdeStats};
pub use sum::{pairwise_sum, NeumaierSum};

/// Volume of the unit ball in ℝ^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    // π^{m/2} / Γ(m/2 + 1), with Γ at half-integers by recursion.
    let half_pi = std::f64::consts::PI.sqrt();
    let mut gamma = if m % 2 == 0 { 1.0 } else { half_pi };
    let mut arg = if m % 2 == 0 { 1.0 } else { 0.5 };
    let target = m as f64 / 2.0 + 1.0;
    while arg + 0.5 < target {
        gamma *= arg;
        arg += 1.0;
    }
    std::f64::consts::PI.powf(m as f64 / 2.0) / gamma
}

/// Surface area of the unit sphere 𝕊^{m-1} ⊂ ℝ^m, i.e. m·ω_m.
pub fn unit_sphere_area(m: usize) -> f64 {
    m as f64 * unit_ball_volume(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes_low_dimensions() {
        assert!((unit_ball_volume(0) - 1.0).abs() < 1e-15);
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
