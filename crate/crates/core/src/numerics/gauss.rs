//! Gauss–Jacobi rules by the Golub–Welsch eigenvalue method.

use nalgebra::DMatrix;

/// `Γ(x)` for `x` a positive multiple of `1/2`.
fn gamma_half_multiple(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    debug_assert!((2.0 * x - twice).abs() < 1e-12 && twice > 0.0);
    let (mut g, mut a) = if twice as i64 % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while a < x - 0.25 {
        g *= a;
        a += 1.0;
    }
    g
}

/// Nodes and weights for `∫₋₁¹ f(x) (1−x)^α (1+x)^β dx`, nodes ascending.
///
/// `α` and `β` must be nonnegative multiples of `1/2`.
pub fn gauss_jacobi(k: usize, alpha: f64, beta: f64) -> Vec<(f64, f64)> {
    assert!(k > 0, "Gauss rule needs at least one node");
    let ab = alpha + beta;
    let mu0 =
        2f64.powf(ab + 1.0) * gamma_half_multiple(alpha + 1.0) * gamma_half_multiple(beta + 1.0)
            / gamma_half_multiple(ab + 2.0);
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let fi = i as f64;
        t[(i, i)] = if i == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * fi + ab) * (2.0 * fi + ab + 2.0))
        };
        if i + 1 < k {
            let j = fi + 1.0;
            let s = 2.0 * j + ab;
            let b = (4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt();
            t[(i, i + 1)] = b;
            t[(i + 1, i)] = b;
        }
    }
    let eig = t.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..k)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

pub fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    gauss_jacobi(k, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_moments_are_exact() {
        // ∫₋₁¹ x^j (1−x)^α (1+x)^β dx by a fine Legendre oracle on the smooth cases
        // and closed forms for the first two moments.
        for (alpha, beta) in [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.5, 0.0),
            (1.5, 0.0),
            (1.0, 1.0),
            (0.5, 0.5),
            (2.0, 0.0),
        ] {
            let exact0 = 2f64.powf(alpha + beta + 1.0)
                * gamma_half_multiple(alpha + 1.0)
                * gamma_half_multiple(beta + 1.0)
                / gamma_half_multiple(alpha + beta + 2.0);
            let exact1 = exact0 * (beta - alpha) / (alpha + beta + 2.0);
            for k in 1..20 {
                let r = gauss_jacobi(k, alpha, beta);
                let m0: f64 = r.iter().map(|p| p.1).sum();
                let m1: f64 = r.iter().map(|p| p.1 * p.0).sum();
                assert!((m0 - exact0).abs() < 1e-13, "a={alpha} b={beta} k={k}");
                assert!(
                    (m1 - exact1).abs() < 1e-13,
                    "a={alpha} b={beta} k={k}: {m1} vs {exact1}"
                );
            }
        }
    }

    #[test]
    fn legendre_integrates_high_degree() {
        let r = gauss_legendre(8);
        let q: f64 = r.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((q - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_with_linear_weight_matches_legendre_oracle() {
        // ∫₋₁¹ x⁴(1−x) dx = 2/5.
        let r = gauss_jacobi(3, 1.0, 0.0);
        let q: f64 = r.iter().map(|(x, w)| w * x.powi(4)).sum();
        assert!((q - 0.4).abs() < 1e-14);
    }
}
