//! One interior point on [0, 2] with q = 0: the Dirichlet-to-Neumann map
//! has a closed form, and the index of D(·) − 0 is +1 at the Neumann
//! eigenvalue 0 and −1 at the Dirichlet eigenvalue 2.

use std::error::Error;

use gindex::contour::Contour;
use gindex::numkit::{CMatrix, C64, ZERO};
use gindex::schrodinger::{index_vs_multiplicity, Grid, SchrodingerModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = SchrodingerModel::new(Grid::Interval { n: 1, length: 2.0 }, vec![ZERO])?;
    let z = C64::new(0.3, 0.7);
    let d = model.dtn(z, false)?;
    let a = (1.0 - z) / (2.0 - z);
    let b = -1.0 / (2.0 - z);
    let closed = CMatrix::from_vec(2, 2, vec![a, b, b, a]);
    println!("|D(z) - closed form| = {:.1e}", d.max_abs_diff(&closed));

    let theta = CMatrix::zeros(2, 2);
    for center in [0.0, 2.0] {
        let c = Contour::new(C64::new(center, 0.0), 0.5, 128)?;
        let v = index_vs_multiplicity(&model, &theta, &c)?;
        println!(
            "C({center}; 0.5): index {} = m_a(A_Θ) {} − m_a(A_D) {}, residual {:.1e}",
            v.index.rounded, v.ma_theta.rounded, v.ma_dirichlet.rounded, v.index.residual
        );
        assert!(v.agree());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
