//! Boundary-triple index formula: for two parameters Θ₁, Θ₂ the indices of
//! Θⱼ − M(·) around each eigenvalue equal m_a(Bⱼ) − m_a(A).

use std::error::Error;

use gindex::btriple::{DonoghueModel, TripleIndexProblem};
use gindex::sampling;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = sampling::rng(99);
    let model = DonoghueModel::random(&mut rng, 6, 2, 2.0)?;
    let t1 = sampling::matrix_with_norm(&mut rng, 2, 2, 2.0);
    let t2 = sampling::matrix_with_norm(&mut rng, 2, 2, 2.0);
    let problem = TripleIndexProblem::new(&model, &t1, &t2)?;
    for c in problem.isolating_contours(128) {
        let v = problem.check(&c)?;
        println!(
            "z₀ ≈ {:7.3}{:+7.3}i  ind₁ {:+} ind₂ {:+}  m_a(B₁) {} m_a(B₂) {} m_a(A) {}",
            c.center.re, c.center.im, v.index1.rounded, v.index2.rounded, v.ma_b1.rounded, v.ma_b2.rounded, v.ma_a.rounded
        );
        assert!(v.agree());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
