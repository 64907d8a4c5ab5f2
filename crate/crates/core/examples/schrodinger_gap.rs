//! Ground-state factorization of a Schrodinger-type operator and the
//! resolvent gap against its weighted homogenized counterpart.

use homog::discretize::TorusGrid;
use homog::fields::CoefficientField;
use homog::linsolve::SolveOptions;
use homog::schrodinger::{
    factorization_check, schrodinger_resolvent_gap, FactorizationData, PotentialPath, SchrodingerScenario,
};

fn main() -> homog::Result<()> {
    let g = CoefficientField::x1_cosine(2.0, 1.0);
    let omega = CoefficientField::exp_gibbs(0.5);
    let density = 64;
    let data = FactorizationData::new(g.clone(), g, omega, density)?;
    let grid = TorusGrid::new(256, 32, 1.0)?;
    let scn = SchrodingerScenario::new(data, PotentialPath::Discrete, None, grid, density)?;
    println!("lambda {:.4}  margin {:.4}", scn.lambda, scn.margin);
    let opts = SolveOptions::default().with_seed(5);
    for eps in [0.25, 0.125, 0.0625] {
        let fact = factorization_check(&scn, eps, 4, 5)?;
        let gap = schrodinger_resolvent_gap(&scn, eps, &opts)?;
        println!("eps {eps:<7} factorization {fact:.2e}  gap {:.4e}", gap.value);
    }
    Ok(())
}
