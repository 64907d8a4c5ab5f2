//! Operator norm of a resolvent difference by power iteration, checked
//! against a dense eigendecomposition.

use homog::discretize::{assemble_effective_operator, assemble_eps_operator, TorusGrid};
use homog::effective::effective_profile;
use homog::fields::{CoefficientField, Coefficients};
use homog::linsolve::{resolvent_gap, SolveOptions, PROFILE_TOL};
use nalgebra::DMatrix;

fn main() -> homog::Result<()> {
    let c = Coefficients::new(
        CoefficientField::two_phase(1.0, 4.0),
        CoefficientField::x1_cosine(2.0, 1.0),
        CoefficientField::constant(1.0),
    );
    let grid = TorusGrid::new(64, 4, 1.0)?;
    let eps = 0.25;
    let est = resolvent_gap(&c, &grid, eps, &SolveOptions::default().with_tol(1e-12))?;

    let n = grid.len();
    let fine = assemble_eps_operator(&grid, &c.g1, &c.g2, &c.q, eps)?;
    let profile = effective_profile(&c.g1, &c.g2, &c.q, &grid.x2_profile_nodes(), PROFILE_TOL)?;
    let coarse = assemble_effective_operator(&profile, &grid)?;
    let a = DMatrix::from_row_slice(n, n, &fine.to_dense()).try_inverse().expect("invertible");
    let b = DMatrix::from_row_slice(n, n, &coarse.to_dense()).try_inverse().expect("invertible");
    let d = &a - &b;
    let d = (&d + d.transpose()) * 0.5;
    let dense = d.symmetric_eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    println!("power iteration {:.10e} ({} iterations)", est.value, est.iterations);
    println!("dense           {dense:.10e}");
    println!("ratio           {:.8}", est.value / dense);
    Ok(())
}
