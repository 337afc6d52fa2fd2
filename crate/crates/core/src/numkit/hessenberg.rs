use super::eig::hessenberg_in_place;
use super::matrix::{CMatrix, C64, ZERO};
use super::NumError;

const RESCALE_ABOVE: f64 = 1e100;

/// Upper Hessenberg form of a square matrix, split into unreduced diagonal
/// blocks, for fast evaluation of `tr (A − z)⁻¹`.
#[derive(Clone, Debug)]
pub struct HessenbergForm {
    h: CMatrix,
    blocks: Vec<(usize, usize)>,
}

impl HessenbergForm {
    pub fn new(a: &CMatrix) -> Result<Self, NumError> {
        if !a.is_square() {
            return Err(NumError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        a.check_finite()?;
        let mut h = a.clone();
        hessenberg_in_place(&mut h);
        let n = h.rows();
        let norm = h.norm_fro();
        let mut blocks = Vec::new();
        let mut lo = 0;
        for i in 1..n {
            let mut scale = h[(i, i)].norm() + h[(i - 1, i - 1)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if h[(i, i - 1)].norm() <= f64::EPSILON * scale {
                h[(i, i - 1)] = ZERO;
                blocks.push((lo, i - 1));
                lo = i;
            }
        }
        if n > 0 {
            blocks.push((lo, n - 1));
        }
        Ok(Self { h, blocks })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    /// `tr (H − z)⁻¹ = −(d/dz) ln det(H − z)`, from Hyman's recurrence on
    /// each unreduced block: O(n²) per evaluation.
    pub fn resolvent_trace(&self, z: C64) -> Result<C64, NumError> {
        let mut total = ZERO;
        for &(lo, hi) in &self.blocks {
            total += self.block_trace(lo, hi, z)?;
        }
        Ok(total)
    }

    fn block_trace(&self, lo: usize, hi: usize, z: C64) -> Result<C64, NumError> {
        let h = &self.h;
        let a = |i: usize, j: usize| if i == j { h[(i, j)] - z } else { h[(i, j)] };
        let m = hi - lo + 1;
        // x solves rows lo+1..=hi of (H − z)x = 0 with x_hi = 1; dx = x'(z)
        let mut x = vec![ZERO; m];
        let mut dx = vec![ZERO; m];
        x[m - 1] = C64::new(1.0, 0.0);
        for i in (lo + 1..=hi).rev() {
            let mut s = ZERO;
            let mut ds = ZERO;
            for j in i..=hi {
                let aij = a(i, j);
                s += aij * x[j - lo];
                ds += aij * dx[j - lo];
            }
            ds -= x[i - lo];
            let sub = h[(i, i - 1)];
            x[i - 1 - lo] = -s / sub;
            dx[i - 1 - lo] = -ds / sub;
            let big = x[i - 1 - lo].norm().max(dx[i - 1 - lo].norm());
            if big > RESCALE_ABOVE {
                let f = 1.0 / big;
                for k in i - 1 - lo..m {
                    x[k] *= f;
                    dx[k] *= f;
                }
            }
        }
        let mut alpha = ZERO;
        let mut dalpha = ZERO;
        for j in lo..=hi {
            let aj = a(lo, j);
            alpha += aj * x[j - lo];
            dalpha += aj * dx[j - lo];
        }
        dalpha -= x[0];
        if alpha == ZERO || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(NumError::SingularMatrix { pivot: lo, magnitude: 0.0 });
        }
        Ok(-dalpha / alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::inverse;

    #[test]
    fn matches_dense_inverse_trace() {
        let a = CMatrix::from_fn(7, 7, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 * 0.5)
        });
        let hf = HessenbergForm::new(&a).unwrap();
        for z in [C64::new(0.3, 0.1), C64::new(-2.0, 4.0), C64::new(10.0, -1.0)] {
            let dense = inverse(&a.shift_diagonal(-z)).unwrap().trace();
            let fast = hf.resolvent_trace(z).unwrap();
            assert!((dense - fast).norm() < 1e-11 * dense.norm().max(1.0), "{dense} vs {fast}");
        }
    }

    #[test]
    fn reduced_blocks() {
        let a = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(-3.0, 1.0)]);
        let hf = HessenbergForm::new(&a).unwrap();
        let z = C64::new(0.5, 0.5);
        let expect: C64 = a.diagonal().iter().map(|d| 1.0 / (d - z)).sum();
        assert!((hf.resolvent_trace(z).unwrap() - expect).norm() < 1e-15);
        assert!(hf.resolvent_trace(C64::new(2.0, 0.0)).is_err());
    }
}
