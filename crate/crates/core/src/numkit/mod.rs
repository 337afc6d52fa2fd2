//! Dense complex linear algebra: LU solves, traces, pivoted-QR rank and a
//! small Hessenberg-QR eigensolver used as an independent oracle.

mod eig;
mod hessenberg;
mod lu;
mod matrix;
mod rank;

use thiserror::Error;

pub use eig::{cluster_values, eig_cluster, eigenvalues, hessenberg_in_place, EigCluster, EigList};
pub use hessenberg::HessenbergForm;
pub use lu::{inverse, lu_solve, Lu};
pub use matrix::{inner, vec_norm, CMatrix, C64, I, ONE, ZERO};
pub use rank::{orthonormalize_columns, r_diagonal, rank_tol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("singular matrix: pivot {pivot} has magnitude {magnitude:e}")]
    SingularMatrix { pivot: usize, magnitude: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Sum of diagonal entries.
pub fn trace(a: &CMatrix) -> C64 {
    debug_assert!(a.is_square());
    a.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    assert_eq!(a.cols(), b.rows());
    assert_eq!(a.rows(), b.cols());
    let mut s = ZERO;
    for i in 0..a.rows() {
        for (k, &aik) in a.row(i).iter().enumerate() {
            s += aik * b[(k, i)];
        }
    }
    s
}
