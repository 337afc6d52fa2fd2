use std::cmp::Ordering;

use super::matrix::{CMatrix, C64, ZERO};
use super::NumError;

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a square matrix by Householder reduction to upper
/// Hessenberg form followed by single-shift complex QR with Wilkinson shifts.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>, NumError> {
    if !a.is_square() {
        return Err(NumError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.check_finite()?;
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    hessenberg_qr(h)
}

/// Reduces `h` to upper Hessenberg form by unitary similarity.
pub fn hessenberg_in_place(h: &mut CMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = super::matrix::vec_norm(&v);
        if alpha == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == ZERO { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        v[0] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / vnorm2;
        // H <- Q H with Q = I - beta v v^H acting on rows k+1..n
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            let f = dot * beta;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * f;
            }
        }
        // H <- H Q acting on columns k+1..n
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| h[(i, k + 1 + t)] * vi).sum();
            let f = dot * beta;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= f * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(mut h: CMatrix) -> Result<Vec<C64>, NumError> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.norm_fro();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = SWEEPS_PER_EIGENVALUE * n.max(1);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // find the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if s <= eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        if total >= budget {
            return Err(NumError::NoConvergence { iterations: total });
        }
        iter += 1;
        total += 1;
        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.35 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let p = h[(k, j)];
                let q = h[(k + 1, j)];
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = -s.conj() * p + q * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (t, &(c, s)) in rots.iter().enumerate() {
            let k = lo + t;
            for i in lo..=(k + 1).min(hi) {
                let p = h[(i, k)];
                let q = h[(i, k + 1)];
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = -p * s + q * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumError::NoConvergence { iterations: total });
    }
    Ok(eig)
}

/// One cluster of numerically coincident eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct EigCluster {
    /// The first member in clustering order; used for the merge test.
    pub center: C64,
    /// Arithmetic mean of the members; a better estimate for a defective eigenvalue.
    pub mean: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigList {
    pub clusters: Vec<EigCluster>,
    pub tol: f64,
}

impl EigList {
    pub fn dimension(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    /// Total multiplicity of clusters whose mean lies strictly inside the disk.
    pub fn count_in_disk(&self, center: C64, radius: f64) -> usize {
        self.clusters
            .iter()
            .filter(|c| (c.mean - center).norm() < radius)
            .map(|c| c.multiplicity)
            .sum()
    }

    pub fn means(&self) -> Vec<C64> {
        self.clusters.iter().map(|c| c.mean).collect()
    }
}

fn magnitude_order(a: &C64, b: &C64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

/// Groups values greedily in (|λ|, re, im) order: each value joins the first
/// existing cluster whose center is within `tol`, else starts a new one.
pub fn cluster_values(values: &[C64], tol: f64) -> EigList {
    let mut sorted = values.to_vec();
    sorted.sort_by(magnitude_order);
    let mut members: Vec<(C64, Vec<C64>)> = Vec::new();
    for z in sorted {
        match members.iter_mut().find(|(c, _)| (z - c).norm() <= tol) {
            Some((_, m)) => m.push(z),
            None => members.push((z, vec![z])),
        }
    }
    let clusters = members
        .into_iter()
        .map(|(center, m)| EigCluster {
            center,
            mean: m.iter().sum::<C64>() / m.len() as f64,
            multiplicity: m.len(),
        })
        .collect();
    EigList { clusters, tol }
}

/// Eigenvalues of `a` clustered under `tol`.
pub fn eig_cluster(a: &CMatrix, tol: f64) -> Result<EigList, NumError> {
    if !(tol > 0.0) {
        return Err(NumError::InvalidTolerance(tol));
    }
    Ok(cluster_values(&eigenvalues(a)?, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn spec_examples() {
        let d = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        let e = eig_cluster(&d, 1e-8).unwrap();
        assert_eq!(e.clusters.len(), 2);
        assert_eq!(e.clusters[0].multiplicity, 1);
        assert!((e.clusters[0].mean - 1.0).norm() < 1e-14);
        assert_eq!(e.clusters[1].multiplicity, 2);

        let j = CMatrix::from_real(2, 2, &[5.0, 1.0, 0.0, 5.0]);
        let e = eig_cluster(&j, 1e-6).unwrap();
        assert_eq!(e.clusters.len(), 1);
        assert_eq!(e.clusters[0].multiplicity, 2);
        assert!((e.clusters[0].mean - 5.0).norm() < 1e-10);

        let r = CMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = eig_cluster(&r, 1e-8).unwrap();
        assert_eq!(e.clusters.len(), 2);
        let mut m = e.means();
        m.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((m[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((m[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1, 2, 3, 4 of (z-1)(z-2)(z-3)(z-4) = z^4 - 10z^3 + 35z^2 - 50z + 24
        let a = CMatrix::from_real(
            4,
            4,
            &[10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        );
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (k, z) in ev.iter().enumerate() {
            assert!((z - (k as f64 + 1.0)).norm() < 1e-10, "{z}");
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(matches!(
            eig_cluster(&CMatrix::identity(2), 0.0),
            Err(NumError::InvalidTolerance(_))
        ));
    }
}
