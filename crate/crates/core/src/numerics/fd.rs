//! Finite-difference stencils.

/// Fornberg weights for the `m`-th derivative at 0 from samples at `offsets`.
pub fn fornberg_weights(offsets: &[f64], m: usize) -> Vec<f64> {
    let n = offsets.len();
    assert!(m < n, "stencil too small for derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Symmetric integer stencil `-half..=half`.
pub fn central_offsets(half: usize) -> Vec<f64> {
    (-(half as i64)..=half as i64).map(|k| k as f64).collect()
}

/// Fourth-order central first derivative from values at `x ± h`, `x ± 2h`.
#[inline]
pub fn d1_five_point(fm2: f64, fm1: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
}
