//! Principal part of the resolvent at a Jordan block: the coefficients are
//! `-P, -N P, -N² P, …` and their ranks drop by one per order.

use std::error::Error;

use gindex::contour::{principal_part, Contour, Resolvent};
use gindex::numkit::{CMatrix, C64};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let z0 = C64::new(0.5, 0.25);
    let k = 4;
    let mut j = CMatrix::identity(k).scale(z0);
    for i in 0..k - 1 {
        j[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    let nil = j.shift_diagonal(-z0);
    let r = Resolvent::new(j)?;
    let c = Contour::new(z0, 0.5, 128)?;
    let pp = principal_part(&r, &c, k + 1)?;

    let mut expected = CMatrix::identity(k).scale_real(-1.0);
    for t in &pp.terms {
        let err = t.coefficient.max_abs_diff(&expected);
        println!("M_{}: rank {}, error {err:.1e}", t.order, t.rank);
        assert!(err < 1e-9);
        expected = nil.matmul(&expected);
    }
    println!("rank profile {:?}, pole order {}", pp.rank_profile(), pp.pole_order());
    assert_eq!(pp.rank_profile(), vec![4, 3, 2, 1, 0]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
