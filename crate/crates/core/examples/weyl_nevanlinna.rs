//! Weyl function of a Donoghue model: the γ-field identities and the
//! Nevanlinna property Im M(z)/Im z > 0.

use std::error::Error;

use gindex::btriple::DonoghueModel;
use gindex::numkit::{C64, I};
use gindex::sampling;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = sampling::rng(5);
    let model = DonoghueModel::random(&mut rng, 8, 3, 2.0)?;
    println!("M(i) - iI = {:.1e}", model.weyl(I)?.shift_diagonal(-I).norm_max());
    for _ in 0..4 {
        let z = sampling::complex_box(&mut rng, (-3.0, 3.0), (0.1, 2.0));
        let w = sampling::complex_box(&mut rng, (-3.0, 3.0), (-2.0, -0.1));
        let rep = model.weyl_identity_residuals(z, w)?;
        println!(
            "z = {:.3}{:+.3}i: worst identity residual {:.1e}, min eig Im M/Im z = {:.3}",
            z.re,
            z.im,
            rep.checks.iter().filter(|c| c.tol > 0.0).map(|c| c.residual).fold(0.0, f64::max),
            model.nevanlinna_min(z)?
        );
        assert!(rep.passed(), "{rep}");
    }
    let below = C64::new(0.5, -1.0);
    assert!(model.nevanlinna_min(below)? > 0.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
