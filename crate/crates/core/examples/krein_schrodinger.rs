//! Discrete Green identity, Poisson and DtN identities and the Krein formula
//! for a random complex potential on a 2D grid.

use std::error::Error;

use gindex::numkit::C64;
use gindex::sampling;
use gindex::schrodinger::{green_matrix_residual, Grid, SchrodingerModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = sampling::rng(2024);
    let grid = Grid::Rectangle { nx: 4, ny: 3, lx: 1.0, ly: 0.8 };
    let model = SchrodingerModel::build(grid, |x, y| C64::new(3.0 * x * y, 1.0 - x))?;
    let theta = sampling::matrix_with_norm(&mut rng, model.boundary_count(), model.boundary_count(), 3.0);
    println!("Green matrix residual {:.1e}", green_matrix_residual(&model));

    let points: Vec<C64> = (0..6).map(|_| sampling::complex_box(&mut rng, (-5.0, 40.0), (0.5, 5.0))).collect();
    let report = model.verify_identities(&theta, &points)?;
    for name in ["dtn_difference", "robin_inverse_difference", "krein", "krein_adjoint", "poisson_adjoint"] {
        println!("{name:26} worst {:.1e}", report.worst(name).unwrap_or(0.0));
    }
    assert!(report.passed(), "{report}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
