//! The extension B_Θ built two ways: by inverting the Krein resolvent at a
//! reference point, and by solving the boundary condition Γ₁ = ΘΓ₀.

use std::error::Error;

use gindex::btriple::DonoghueModel;
use gindex::numkit::{C64, I};
use gindex::sampling;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = sampling::rng(31);
    let model = DonoghueModel::random(&mut rng, 7, 2, 2.0)?;
    let theta = sampling::matrix_with_norm(&mut rng, 2, 2, 3.0);
    let at_i = model.extension_operator(&theta, I)?;
    let elsewhere = model.extension_operator(&theta, C64::new(2.0, 1.0))?;
    let from_bc = model.extension_matrix_from_bc(&theta)?;
    println!("reference-point independence {:.1e}", at_i.rel_diff(&elsewhere));
    println!("Krein route vs boundary condition {:.1e}", at_i.rel_diff(&from_bc));

    let herm = (&theta + &theta.adjoint()).scale_real(0.5);
    let b = model.extension(&herm)?;
    println!("Hermitian Θ gives ‖B − B*‖ = {:.1e}", b.max_abs_diff(&b.adjoint()));
    assert!(at_i.rel_diff(&from_bc) < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
