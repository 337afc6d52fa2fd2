//! Seeded random draws for tests, examples and randomized verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkit::{orthonormalize_columns, CMatrix, C64};

/// Name recorded in reports so that draws can be reproduced.
pub const GENERATOR_NAME: &str = "ChaCha8";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_uniform<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    // uniform in the disk
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, t)
}

pub fn complex_box<R: Rng>(rng: &mut R, re: (f64, f64), im: (f64, f64)) -> C64 {
    C64::new(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

/// Entries uniform in the unit square `[-1,1]²`.
pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random matrix rescaled to the given Frobenius norm.
pub fn matrix_with_norm<R: Rng>(rng: &mut R, rows: usize, cols: usize, norm: f64) -> CMatrix {
    let m = matrix(rng, rows, cols);
    let f = m.norm_fro();
    if f == 0.0 {
        m
    } else {
        m.scale_real(norm / f)
    }
}

pub fn hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let m = matrix(rng, n, n);
    (&m + &m.adjoint()).scale_real(0.5 * scale)
}

/// `rows x cols` matrix with orthonormal columns.
pub fn isometry<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows);
    loop {
        let q = orthonormalize_columns(&matrix(rng, rows, cols), 1e-8);
        if q.cols() == cols {
            return q;
        }
    }
}

pub fn vector<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
