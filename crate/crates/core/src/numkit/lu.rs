use std::f64::consts::PI;

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::NumError;

/// LU factorization with partial pivoting, `P A = L U`, stored packed.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Factors a square matrix. A pivot at or below `n * eps * ‖A‖_max` is
    /// treated as exact singularity.
    pub fn factor(a: &CMatrix) -> Result<Self, NumError> {
        if !a.is_square() {
            return Err(NumError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        a.check_finite()?;
        let n = a.rows();
        let threshold = n as f64 * f64::EPSILON * a.norm_max();
        // Row exchanges stay within the lower band, so fill is confined to
        // `kl + ku` columns right of the pivot.
        let (kl, ku) = bandwidths(a);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let last_row = (k + kl + 1).min(n);
            let last_col = (k + kl + ku + 1).min(n);
            let (p, pmax) = (k..last_row)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= threshold || pmax == 0.0 {
                return Err(NumError::SingularMatrix { pivot: k, magnitude: pmax.max(0.0) });
            }
            if p != k {
                swap_rows(&mut lu, p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let inv = ONE / lu[(k, k)];
            let data = lu.as_mut_slice();
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_mut(n).take(last_row - k - 1) {
                let l = row[k] * inv;
                row[k] = l;
                if l == ZERO {
                    continue;
                }
                for j in k + 1..last_col {
                    row[j] -= l * pivot_row[j];
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix, NumError> {
        self.check_rhs(b)?;
        let n = self.n;
        let m = b.cols();
        let mut x = CMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        // forward substitution with unit lower factor
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= u * v;
                }
            }
            let inv = ONE / self.lu[(i, i)];
            for j in 0..m {
                x[(i, j)] *= inv;
            }
        }
        Ok(x)
    }

    /// Solves `Aᵀ X = B` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &CMatrix) -> Result<CMatrix, NumError> {
        self.check_rhs(b)?;
        let n = self.n;
        let m = b.cols();
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ w = y, x = Pᵀ w.
        let mut y = b.clone();
        for i in 0..n {
            for k in 0..i {
                let u = self.lu[(k, i)];
                if u == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = y[(k, j)];
                    y[(i, j)] -= u * v;
                }
            }
            let inv = ONE / self.lu[(i, i)];
            for j in 0..m {
                y[(i, j)] *= inv;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let l = self.lu[(k, i)];
                if l == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = y[(k, j)];
                    y[(i, j)] -= l * v;
                }
            }
        }
        let mut x = CMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x[(self.perm[i], j)] = y[(i, j)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve(&CMatrix::identity(self.n))
            .expect("identity has matching row count")
    }

    pub fn det(&self) -> C64 {
        let d: C64 = self.lu.diagonal().iter().product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// `(ln|det A|, arg det A)` accumulated from pivots; safe against
    /// overflow for large dimensions. The phase is not reduced modulo 2π.
    pub fn log_det(&self) -> (f64, f64) {
        let mut log_abs = 0.0;
        let mut phase = PI * self.swaps as f64;
        for d in self.lu.diagonal() {
            log_abs += d.norm().ln();
            phase += d.arg();
        }
        (log_abs, phase)
    }

    fn check_rhs(&self, b: &CMatrix) -> Result<(), NumError> {
        if b.rows() != self.n {
            return Err(NumError::DimensionMismatch {
                expected: (self.n, b.cols()),
                found: b.shape(),
            });
        }
        Ok(())
    }
}

/// Lower and upper bandwidths: the largest `i − j` and `j − i` over nonzero entries.
fn bandwidths(a: &CMatrix) -> (usize, usize) {
    let n = a.rows();
    let (mut kl, mut ku) = (0, 0);
    for i in 0..n {
        for (j, v) in a.row(i).iter().enumerate() {
            if *v != ZERO {
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
    }
    (kl, ku)
}

fn swap_rows(m: &mut CMatrix, a: usize, b: usize) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    for j in 0..cols {
        data.swap(a * cols + j, b * cols + j);
    }
}

/// Solves `A X = B` by partial-pivoting LU.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, NumError> {
    Lu::factor(a)?.solve(b)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix, NumError> {
    Ok(Lu::factor(a)?.inverse())
}
