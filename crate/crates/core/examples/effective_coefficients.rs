//! Harmonic and arithmetic means of a few coefficient families, and the
//! effective profile of a field that also varies in x2.

use homog::effective::{arithmetic_mean_x1, effective_profile, harmonic_mean_x1};
use homog::fields::{CoefficientField, Family};

fn main() -> homog::Result<()> {
    let tol = 1e-12;
    let fields = [
        ("2 + cos", CoefficientField::x1_cosine(2.0, 1.0)),
        ("two-phase 1/4", CoefficientField::two_phase(1.0, 4.0)),
        ("exp-gibbs", CoefficientField::exp_gibbs(0.5)),
        ("tabulated", CoefficientField::tabulated(vec![1.0, 3.0, 2.0, 0.5])?),
    ];
    println!("{:<14} {:>12} {:>12}", "field", "harmonic", "arithmetic");
    for (name, f) in &fields {
        let h = harmonic_mean_x1(f, 0.0, tol)?;
        let a = arithmetic_mean_x1(f, 0.0, tol)?;
        println!("{name:<14} {h:>12.9} {a:>12.9}");
    }

    let g1 = CoefficientField::new(Family::X1Cosine, vec![2.0, 1.0, 0.5, 0.0], 1.0)?;
    let q = CoefficientField::constant(1.0);
    let nodes: Vec<f64> = (0..8).map(|j| j as f64 / 8.0).collect();
    let p = effective_profile(&g1, &g1, &q, &nodes, tol)?;
    println!("\n{:>6} {:>10} {:>10} {:>10}", "x2", "g1_eff", "g2_eff", "q_eff");
    for j in 0..p.len() {
        println!("{:>6.3} {:>10.6} {:>10.6} {:>10.6}", nodes[j], p.g1_eff[j], p.g2_eff[j], p.q_eff[j]);
    }
    Ok(())
}
