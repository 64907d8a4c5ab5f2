//! Spectrum of an operator on M periodic cells against the union of its
//! Bloch fibers at the M admissible quasimomenta.

use homog::bloch::fiber_decomposition_check;
use homog::fields::{CoefficientField, Coefficients};

fn main() -> homog::Result<()> {
    let c = Coefficients::new(
        CoefficientField::x1_cosine(2.0, 1.0),
        CoefficientField::two_phase(1.0, 3.0),
        CoefficientField::constant(1.0),
    );
    let r = fiber_decomposition_check(&c, 0.25, 4, 16, 16, 4)?;
    println!("quasimomenta {:?}", r.quasimomenta);
    println!("lowest-eigenvalue deviation {:.3e}", r.max_deviation);
    println!("full spectrum deviation     {:.3e}", r.full_deviation);
    println!("pass {}", r.pass);
    Ok(())
}
