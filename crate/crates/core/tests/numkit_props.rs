//! Linear-algebra invariants on random matrices, with nalgebra as an
//! independent oracle for determinants and eigenvalues.

use gindex::numkit::{
    eig_cluster, eigenvalues, inverse, lu_solve, rank_tol, trace_of_product, vec_norm, CMatrix, HessenbergForm, Lu, C64,
};
use gindex::sampling;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn to_na(a: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn random(seed: u64, rows: usize, cols: usize) -> CMatrix {
    sampling::matrix(&mut sampling::rng(seed), rows, cols)
}

/// Worst distance from each value in `a` to its greedy partner in `b`.
fn matching(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solve_has_small_backward_error(seed in any::<u64>(), n in 1usize..14) {
        let a = random(seed, n, n);
        let b = random(seed ^ 1, n, 2);
        let x = lu_solve(&a, &b).unwrap();
        let r = (&a.matmul(&x) - &b).norm_fro();
        prop_assert!(r <= 1e-12 * (a.norm_fro() * x.norm_fro() + b.norm_fro()));
    }

    #[test]
    fn banded_solve_matches_dense_oracle(seed in any::<u64>(), n in 2usize..16, kl in 0usize..4, ku in 0usize..4) {
        // small diagonal forces pivoting inside the band
        let full = random(seed, n, n);
        let a = CMatrix::from_fn(n, n, |i, j| {
            if i == j { full[(i, j)].scale(1e-3) } else if i > j + kl || j > i + ku { C64::new(0.0, 0.0) } else { full[(i, j)] }
        });
        prop_assume!(to_na(&a).determinant().norm() > 1e-12);
        let b = random(seed ^ 2, n, 3);
        let x = lu_solve(&a, &b).unwrap();
        let oracle = to_na(&a).lu().solve(&to_na(&b)).unwrap();
        let scale = oracle.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for i in 0..n {
            for j in 0..3 {
                prop_assert!((x[(i, j)] - oracle[(i, j)]).norm() < 1e-8 * scale);
            }
        }
        let det = Lu::factor(&a).unwrap().det();
        let theirs = to_na(&a).determinant();
        prop_assert!((det - theirs).norm() <= 1e-10 * theirs.norm());
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>(), n in 1usize..10) {
        let a = random(seed, n, n);
        let inv = inverse(&a).unwrap();
        let cond = a.norm_fro() * inv.norm_fro();
        prop_assert!(a.matmul(&inv).max_abs_diff(&CMatrix::identity(n)) < 1e-13 * cond);
        prop_assert!(inv.matmul(&a).max_abs_diff(&CMatrix::identity(n)) < 1e-13 * cond);
    }

    #[test]
    fn determinant_matches_nalgebra(seed in any::<u64>(), n in 1usize..10) {
        let a = random(seed, n, n);
        let ours = Lu::factor(&a).unwrap().det();
        let theirs = to_na(&a).determinant();
        prop_assert!((ours - theirs).norm() <= 1e-11 * theirs.norm().max(1e-300) + 1e-14);
        let (log_abs, phase) = Lu::factor(&a).unwrap().log_det();
        let rebuilt = C64::from_polar(log_abs.exp(), phase);
        prop_assert!((rebuilt - theirs).norm() <= 1e-11 * theirs.norm());
    }

    #[test]
    fn eigenvalues_match_nalgebra(seed in any::<u64>(), n in 1usize..12) {
        let a = random(seed, n, n);
        let ours = eigenvalues(&a).unwrap();
        let theirs: Vec<C64> = to_na(&a).schur().eigenvalues().unwrap().iter().copied().collect();
        prop_assert_eq!(ours.len(), n);
        prop_assert!(matching(&ours, &theirs) < 1e-9 * a.norm_fro().max(1.0));
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_multiply_to_det(seed in any::<u64>(), n in 1usize..12) {
        let a = random(seed, n, n);
        let ev = eigenvalues(&a).unwrap();
        let sum: C64 = ev.iter().sum();
        let prod: C64 = ev.iter().product();
        prop_assert!((sum - a.trace()).norm() < 1e-11 * a.norm_fro().max(1.0));
        let det = Lu::factor(&a).unwrap().det();
        prop_assert!((prod - det).norm() < 1e-9 * det.norm().max(1.0));
    }

    #[test]
    fn clusters_preserve_dimension(seed in any::<u64>(), n in 1usize..10) {
        // a diagonalizable matrix with repeated eigenvalues
        let mut rng = sampling::rng(seed);
        let q = sampling::isometry(&mut rng, n, n);
        let d: Vec<C64> = (0..n).map(|k| C64::new((k % 3) as f64, 0.0)).collect();
        let a = q.matmul(&CMatrix::from_diag(&d)).matmul(&q.adjoint());
        let list = eig_cluster(&a, 1e-6).unwrap();
        prop_assert_eq!(list.dimension(), n);
        prop_assert_eq!(list.clusters.len(), n.min(3));
    }

    #[test]
    fn trace_of_product_is_cyclic(seed in any::<u64>(), r in 1usize..8, c in 1usize..8) {
        let a = random(seed, r, c);
        let b = random(seed ^ 7, c, r);
        prop_assert!((trace_of_product(&a, &b) - trace_of_product(&b, &a)).norm() < 1e-13 * (r * c) as f64);
    }

    #[test]
    fn hessenberg_resolvent_trace_matches_inverse(seed in any::<u64>(), n in 1usize..14) {
        let a = random(seed, n, n);
        let z = sampling::complex_uniform(&mut sampling::rng(seed ^ 3), 3.0);
        let form = HessenbergForm::new(&a).unwrap();
        let dense = inverse(&a.shift_diagonal(-z)).unwrap();
        let t = form.resolvent_trace(z).unwrap();
        prop_assert!((t - dense.trace()).norm() < 1e-10 * dense.norm_fro().max(1.0));
    }

    #[test]
    fn rank_of_low_rank_product(seed in any::<u64>(), n in 2usize..10, r in 1usize..6) {
        let r = r.min(n);
        let a = random(seed, n, r).matmul(&random(seed ^ 5, r, n));
        prop_assert_eq!(rank_tol(&a, 1e-10), r);
    }
}

#[test]
fn nonfinite_input_is_rejected() {
    let mut a = CMatrix::identity(3);
    a[(1, 2)] = C64::new(f64::NAN, 0.0);
    assert!(a.check_finite().is_err());
    assert!(vec_norm(&[C64::new(3.0, 4.0)]) == 5.0);
}
