//! Structural invariants of the Schrödinger and Donoghue models on random
//! instances.

use gindex::btriple::{DonoghueModel, TripleIndexProblem};
use gindex::contour::Contour;
use gindex::numkit::{CMatrix, C64};
use gindex::sampling;
use gindex::schrodinger::{
    conjugate_spectrum_mismatch, green_matrix_residual, green_residual, Grid, IndexProblem, SchrodingerModel,
};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (1usize..9, 0.5..3.0f64).prop_map(|(n, length)| Grid::Interval { n, length }),
        (1usize..4, 1usize..4, 0.5..2.0f64, 0.5..2.0f64).prop_map(|(nx, ny, lx, ly)| Grid::Rectangle { nx, ny, lx, ly }),
    ]
}

fn schrodinger(grid: Grid, seed: u64) -> SchrodingerModel {
    let mut rng = sampling::rng(seed);
    let q = (0..grid.interior_count()).map(|_| sampling::complex_uniform(&mut rng, 5.0)).collect();
    SchrodingerModel::new(grid, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_identity_holds(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        prop_assert!(green_matrix_residual(&model) < 1e-12);
        let mut rng = sampling::rng(seed ^ 9);
        let f = sampling::vector(&mut rng, model.full_count());
        let g = sampling::vector(&mut rng, model.full_count());
        prop_assert!(green_residual(&model, &f, &g) < 1e-12);
    }

    #[test]
    fn dtn_adjoint_is_partner_at_conjugate(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        let z = sampling::complex_box(&mut sampling::rng(seed ^ 2), (-3.0, 3.0), (0.3, 2.0));
        let d = model.dtn(z, false).unwrap();
        let partner = model.dtn(z.conj(), true).unwrap();
        prop_assert!(model.theta_star(&d).rel_diff(&partner) < 1e-10);
    }

    #[test]
    fn dtn_derivative_matches_central_differences(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        let z = sampling::complex_box(&mut sampling::rng(seed ^ 3), (-3.0, 3.0), (0.5, 2.0));
        let exact = model.dtn_prime(z).unwrap();
        let fd = |h: f64| {
            let hp = C64::new(h, 0.0);
            (&model.dtn(z + hp, false).unwrap() - &model.dtn(z - hp, false).unwrap()).scale_real(0.5 / h)
        };
        let h = 1e-5 * z.norm().max(1.0);
        let (e1, e2) = (fd(h).rel_diff(&exact), fd(h / 2.0).rel_diff(&exact));
        prop_assert!(e1 < 1e-6, "{e1:e}");
        // halving helps until roundoff, about ε‖D‖/(h‖D'‖), takes over
        let d = model.dtn(z, false).unwrap();
        let floor = 1e2 * f64::EPSILON * d.norm_max() / (0.5 * h * exact.norm_max());
        prop_assert!(e2 <= e1 || e2 < floor, "{e1:e} then {e2:e}, roundoff floor {floor:e}");
    }

    #[test]
    fn index_over_the_whole_spectrum_is_zero(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        prop_assume!(model.interior_count() <= 6);
        let nb = model.boundary_count();
        let theta = sampling::matrix_with_norm(&mut sampling::rng(seed ^ 8), nb, nb, 2.0);
        let p = IndexProblem::new(&model, &theta, false).unwrap();
        let spectrum = p.spectrum();
        let center = spectrum.iter().sum::<C64>() / spectrum.len() as f64;
        let reach = spectrum.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        let big = Contour::new(center, 2.0 * reach + 1.0, 1024).unwrap();
        let v = p.check(&big).unwrap();
        prop_assert!(v.agree(), "{v:?}");
        prop_assert_eq!(v.index.rounded, 0);
        let local: i64 = p.isolating_contours(128).iter().map(|c| p.check(c).unwrap().index.rounded).sum();
        prop_assert_eq!(local, 0);
    }

    #[test]
    fn identities_hold_at_random_points(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        let mut rng = sampling::rng(seed ^ 4);
        let nb = model.boundary_count();
        let theta = sampling::matrix_with_norm(&mut rng, nb, nb, 3.0);
        let pts: Vec<C64> = (0..4).map(|_| sampling::complex_box(&mut rng, (-4.0, 4.0), (0.2, 3.0))).collect();
        let rep = model.verify_identities(&theta, &pts).unwrap();
        prop_assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn adjoint_spectrum_is_conjugate(grid in grid_strategy(), seed in any::<u64>()) {
        let model = schrodinger(grid, seed);
        let nb = model.boundary_count();
        let theta = sampling::matrix_with_norm(&mut sampling::rng(seed ^ 5), nb, nb, 3.0);
        prop_assert!(conjugate_spectrum_mismatch(&model, &theta).unwrap() < 1e-8);
    }

    #[test]
    fn index_formula_on_small_intervals(n in 1usize..6, seed in any::<u64>()) {
        let model = schrodinger(Grid::Interval { n, length: 1.0 + n as f64 * 0.3 }, seed);
        let theta = sampling::matrix_with_norm(&mut sampling::rng(seed ^ 6), 2, 2, 2.0);
        let p = IndexProblem::new(&model, &theta, false).unwrap();
        for c in p.isolating_contours(128) {
            let v = p.check(&c).unwrap();
            prop_assert!(v.agree(), "{v:?}");
            prop_assert_eq!(v.index.rounded, v.oracle_index());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weyl_function_is_nevanlinna(seed in any::<u64>(), n in 1usize..9, m in 1usize..4) {
        let m = m.min(n);
        let mut rng = sampling::rng(seed);
        let model = DonoghueModel::random(&mut rng, n, m, 2.0).unwrap();
        let z = sampling::complex_box(&mut rng, (-3.0, 3.0), (0.1, 3.0));
        let w = sampling::complex_box(&mut rng, (-3.0, 3.0), (-3.0, -0.1));
        prop_assert!(model.nevanlinna_min(z).unwrap() > 0.0);
        prop_assert!(model.nevanlinna_min(w).unwrap() > 0.0);
        let rep = model.weyl_identity_residuals(z, w).unwrap();
        prop_assert!(rep.passed(), "{rep}");
        let mc = model.weyl(z.conj()).unwrap();
        prop_assert!(mc.max_abs_diff(&model.weyl(z).unwrap().adjoint()) < 1e-10 * mc.norm_max().max(1.0));
    }

    #[test]
    fn extension_routes_agree(seed in any::<u64>(), n in 1usize..9, m in 1usize..4) {
        let m = m.min(n);
        let mut rng = sampling::rng(seed);
        let model = DonoghueModel::random(&mut rng, n, m, 2.0).unwrap();
        let theta = sampling::matrix_with_norm(&mut rng, m, m, 3.0);
        let b = model.extension(&theta).unwrap();
        let from_bc = model.extension_matrix_from_bc(&theta).unwrap();
        prop_assert!(b.rel_diff(&from_bc) < 1e-8);
        let herm = (&theta + &theta.adjoint()).scale_real(0.5);
        let bh = model.extension(&herm).unwrap();
        prop_assert!(bh.max_abs_diff(&bh.adjoint()) < 1e-8 * bh.norm_max().max(1.0));
    }

    #[test]
    fn index_difference_matches_multiplicities(seed in any::<u64>(), n in 1usize..7, m in 1usize..3) {
        let m = m.min(n);
        let mut rng = sampling::rng(seed);
        let model = DonoghueModel::random(&mut rng, n, m, 2.0).unwrap();
        let t1 = sampling::matrix_with_norm(&mut rng, m, m, 3.0);
        let t2 = sampling::matrix_with_norm(&mut rng, m, m, 3.0);
        let p = TripleIndexProblem::new(&model, &t1, &t2).unwrap();
        for c in p.isolating_contours(128) {
            let v = p.check(&c).unwrap();
            prop_assert!(v.agree(), "{v:?}");
        }
    }
}

#[test]
fn singular_theta_shape_is_rejected() {
    let model = DonoghueModel::random(&mut sampling::rng(1), 4, 2, 2.0).unwrap();
    assert!(model.extension(&CMatrix::identity(3)).is_err());
}
