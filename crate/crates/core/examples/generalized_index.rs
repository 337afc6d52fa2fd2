//! Generalized index of a matrix function with zeros and poles, against the
//! determinant-winding oracle.

use std::error::Error;

use gindex::contour::{generalized_index, winding_det, Contour, MatFn};
use gindex::numkit::{CMatrix, C64};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // zeros of total order 3 at 1, a simple pole at 1 and a double pole at -1
    let f = MatFn::from_fn(3, 3, |z| {
        let a = z - 1.0;
        let b = z + 1.0;
        CMatrix::from_diag(&[a, a * a / (b * b), 1.0 / a])
    })
    .with_derivative(|z| {
        let a = z - 1.0;
        let b = z + 1.0;
        CMatrix::from_diag(&[C64::new(1.0, 0.0), 4.0 * a / (b * b * b), -1.0 / (a * a)])
    });

    for (center, radius) in [(1.0, 0.5), (-1.0, 0.5), (0.0, 3.0), (5.0, 1.0)] {
        let c = Contour::new(C64::new(center, 0.0), radius, 128)?;
        let ind = generalized_index(&f, &c)?;
        let wind = winding_det(&f, &c)?;
        println!(
            "C({center}; {radius}): index {} (raw {:.3e}{:+.3e}i, gap {:.1e}), winding {}",
            ind.rounded, ind.raw.re, ind.raw.im, ind.refinement_gap, wind.rounded
        );
        assert!(ind.accepted());
        assert_eq!(ind.rounded, wind.rounded);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
