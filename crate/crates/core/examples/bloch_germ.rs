//! Band bottom of a one-dimensional slice near k = 0: the germ ratio
//! lambda(k)/k² approaches the harmonic mean, and the lowest two bands respect
//! the spectral gap bounds.

use homog::bloch::{gap_check, germ_check, k_grid, slice_constants};
use homog::fields::CoefficientField;

fn main() -> homog::Result<()> {
    let g = CoefficientField::two_phase(1.0, 4.0);
    let n1 = 256;
    let c = slice_constants(&g, n1)?;
    let ks: Vec<f64> = k_grid(c.t0, 9).into_iter().filter(|k| *k > 0.0).collect();
    let germ = germ_check(&g, 0.0, &ks, n1)?;
    println!("harmonic mean {:.6}", germ.germ_value);
    for (k, r) in ks.iter().zip(&germ.ratios) {
        println!("k {k:.4}  lambda/k^2 {r:.6}");
    }
    if let Some(order) = germ.residual_order {
        println!("residual order {order:.3}");
    }
    for k in k_grid(c.t0, 5) {
        let r = gap_check(&g, 0.0, k, &c, n1)?;
        println!("k {k:+.4}  lowest {:.4e} {:.4e}  delta {:.4e}  pass {}", r.lowest[0], r.lowest[1], r.delta, r.pass);
    }
    Ok(())
}
