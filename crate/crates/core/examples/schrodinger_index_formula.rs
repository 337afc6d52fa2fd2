//! Index formula for a Robin realization: around every eigenvalue of A_Θ
//! and A_D, the index of D(·) − Θ equals m_a(A_Θ) − m_a(A_D). The adjoint
//! family (q̄, Θ*) is checked on the conjugate contours.

use std::error::Error;

use gindex::contour::Contour;
use gindex::numkit::C64;
use gindex::sampling;
use gindex::schrodinger::{conjugate_spectrum_mismatch, Grid, IndexProblem, SchrodingerModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = sampling::rng(7);
    let n = 12;
    let q: Vec<C64> = (0..n).map(|_| sampling::complex_uniform(&mut rng, 5.0)).collect();
    let model = SchrodingerModel::new(Grid::Interval { n, length: 1.0 }, q)?;
    let theta = sampling::matrix_with_norm(&mut rng, 2, 2, 5.0);

    let problem = IndexProblem::new(&model, &theta, false)?;
    let adjoint = IndexProblem::new(&model, &theta, true)?;
    let mut nonzero = 0;
    for c in problem.isolating_contours(128) {
        let v = problem.check(&c)?;
        let w = adjoint.check(&Contour { center: c.center.conj(), ..c })?;
        assert!(v.agree() && w.agree());
        if v.index.rounded != 0 {
            nonzero += 1;
        }
        println!(
            "λ ≈ {:8.3}{:+8.3}i  index {:+} = {} − {}   adjoint {:+}",
            c.center.re, c.center.im, v.index.rounded, v.ma_theta.rounded, v.ma_dirichlet.rounded, w.index.rounded
        );
    }
    println!("{nonzero} contours with nonzero index");
    println!("conjugate spectrum mismatch {:.1e}", conjugate_spectrum_mismatch(&model, &theta)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
