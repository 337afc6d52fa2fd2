use super::matrix::{CMatrix, C64, ZERO};

/// Numerical rank from Householder QR with column pivoting: counts the
/// diagonal entries of R above `tol * ‖A‖_F`.
pub fn rank_tol(a: &CMatrix, tol: f64) -> usize {
    let scale = a.norm_fro();
    if scale == 0.0 {
        return 0;
    }
    r_diagonal(a)
        .into_iter()
        .take_while(|&r| r > tol * scale)
        .count()
}

/// Absolute values of the diagonal of R from pivoted QR, non-increasing.
pub fn r_diagonal(a: &CMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut diag = Vec::with_capacity(m.min(n));
    for k in 0..m.min(n) {
        // pick the remaining column with the largest trailing norm
        let (p, pnorm) = (k..n)
            .map(|j| {
                let s: f64 = (k..m).map(|i| r[(i, j)].norm_sqr()).sum();
                (j, s)
            })
            .fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if p != k {
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, p)];
                r[(i, p)] = t;
            }
        }
        let alpha = pnorm.sqrt();
        diag.push(alpha);
        if alpha == 0.0 {
            diag.extend(std::iter::repeat(0.0).take(m.min(n) - k - 1));
            break;
        }
        let x0 = r[(k, k)];
        let phase = if x0 == ZERO { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[(k + t, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * f;
            }
        }
    }
    diag
}

/// Orthonormal basis of the column span via modified Gram–Schmidt with
/// one reorthogonalization pass. Columns below `tol` relative norm are dropped.
pub fn orthonormalize_columns(a: &CMatrix, tol: f64) -> CMatrix {
    let (m, n) = a.shape();
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for j in 0..n {
        let mut v = a.column(j);
        for _ in 0..2 {
            for q in &basis {
                let d: C64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
        }
        let nv = super::matrix::vec_norm(&v);
        if nv > tol * scale {
            basis.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    CMatrix::from_fn(m, basis.len(), |i, j| basis[j][i])
}
