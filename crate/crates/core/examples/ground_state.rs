//! Potential built from a prescribed positive ground state, and the ground
//! state recovered back from that potential.

use homog::discretize::TorusGrid;
use homog::fields::CoefficientField;
use homog::schrodinger::{ground_state, potentials_from_ground_state, sample_slice, PotentialPath};

fn main() -> homog::Result<()> {
    let g = CoefficientField::x1_cosine(2.0, 1.0);
    let omega = CoefficientField::exp_gibbs(0.5);
    let n = 128;
    let line = TorusGrid::line(n)?;
    let p = potentials_from_ground_state(&g, &g, &omega, PotentialPath::Discrete, &line)?;
    let (lo, hi) = p.v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    println!("V ranges over [{lo:.4}, {hi:.4}]");

    let gs = ground_state(&g, &p.v, 0.0)?;
    let exact = sample_slice(&omega, 0.0, n);
    let err = gs.omega.iter().zip(&exact).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    println!("lowest eigenvalue {:.3e}", gs.lambda);
    println!("eigen residual    {:.3e}", gs.residual);
    println!("sup |omega - exact| {err:.3e}");
    Ok(())
}
