//! Algebraic multiplicities from Riesz projections, checked against the
//! eigenvalue oracle.

use std::error::Error;

use gindex::contour::{algebraic_multiplicity, riesz_projection, Contour, Resolvent};
use gindex::numkit::{eig_cluster, CMatrix, C64};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // Jordan block of size 3 at 1, plus simple eigenvalues 4 and -2
    let mut t = CMatrix::from_diag(&[1.0, 1.0, 1.0, 4.0, -2.0].map(|x| C64::new(x, 0.0)));
    t[(0, 1)] = C64::new(1.0, 0.0);
    t[(1, 2)] = C64::new(1.0, 0.0);
    let r = Resolvent::new(t.clone())?;
    let oracle = eig_cluster(&t, 1e-4)?;

    for center in [1.0, 4.0, -2.0, 2.5] {
        let c = Contour::new(C64::new(center, 0.0), 0.75, 128)?;
        let rep = algebraic_multiplicity(&r, &c)?;
        let p = riesz_projection(&r, &c)?;
        let idempotent = p.matmul(&p).max_abs_diff(&p);
        println!(
            "center {center:5.2}: m_a = {} (oracle {}), residual {:.1e}, |P^2 - P| = {idempotent:.1e}",
            rep.rounded,
            oracle.count_in_disk(c.center, c.radius),
            rep.residual
        );
        assert_eq!(rep.rounded as usize, oracle.count_in_disk(c.center, c.radius));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
