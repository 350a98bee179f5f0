//! Small dense linear-algebra helpers on flat slices.

use nalgebra::DMatrix;

/// `⟨a, b⟩_g` for a symmetric matrix `g`.
pub fn inner(g: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut gi = 0.0;
        for j in 0..n {
            gi += g[(i, j)] * b[j];
        }
        s += a[i] * gi;
    }
    s
}

pub fn norm(g: &DMatrix<f64>, a: &[f64]) -> f64 {
    inner(g, a, a).sqrt()
}

/// Gram–Schmidt in the `g` inner product, modified form with one re-orthogonalization pass.
pub fn orthonormalize(g: &DMatrix<f64>, vectors: &mut [Vec<f64>]) {
    for i in 0..vectors.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let c = inner(g, &vectors[i], &vectors[j]);
                let (head, tail) = vectors.split_at_mut(i);
                for (vi, vj) in tail[0].iter_mut().zip(&head[j]) {
                    *vi -= c * vj;
                }
            }
        }
        let nv = norm(g, &vectors[i]);
        vectors[i].iter_mut().for_each(|v| *v /= nv);
    }
}

/// Completes the `g`-orthonormal family `start` to a basis of ℝⁿ.
///
/// Candidates are coordinate vectors; at each step the one with the largest
/// residual norm wins, ties going to the lowest index.
pub fn complete_basis(g: &DMatrix<f64>, start: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = g.nrows();
    let mut basis: Vec<Vec<f64>> = start.to_vec();
    orthonormalize(g, &mut basis);
    let mut used = vec![false; n];
    while basis.len() < n {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for (j, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut cand = vec![0.0; n];
            cand[j] = 1.0;
            for _pass in 0..2 {
                for b in &basis {
                    let c = inner(g, &cand, b);
                    for (ci, bi) in cand.iter_mut().zip(b) {
                        *ci -= c * bi;
                    }
                }
            }
            let nr = norm(g, &cand);
            if best.as_ref().is_none_or(|(_, bn, _)| nr > *bn) {
                best = Some((j, nr, cand));
            }
        }
        let (j, nr, mut cand) = best.expect("basis completion ran out of candidates");
        used[j] = true;
        cand.iter_mut().for_each(|c| *c /= nr);
        basis.push(cand);
    }
    basis
}

/// `Bᵀ g C` for column families `b`, `c`.
pub fn gram_between(g: &DMatrix<f64>, b: &[Vec<f64>], c: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(b.len(), c.len(), |i, j| inner(g, &b[i], &c[j]))
}

/// Householder map sending `e₁` to the unit vector `u` (Euclidean).
pub fn reflector_to(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut w = u.iter().map(|x| -x).collect::<Vec<_>>();
    w[0] += 1.0;
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let mut h = DMatrix::identity(n, n);
    if ww < 1e-30 {
        return h;
    }
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= 2.0 * w[i] * w[j] / ww;
        }
    }
    h
}
