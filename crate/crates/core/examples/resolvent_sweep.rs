//! Resolvent gap between the oscillating and the homogenized operator for a
//! decreasing sequence of periods, with a log-log slope fit.

use homog::discretize::TorusGrid;
use homog::fields::{CoefficientField, Coefficients};
use homog::fit::loglog_fit;
use homog::linsolve::{PreconditionerKind, ResolventPair, SolveOptions};

fn main() -> homog::Result<()> {
    let c = Coefficients::new(
        CoefficientField::x1_cosine(2.0, 1.0),
        CoefficientField::x1_cosine(2.0, 1.0),
        CoefficientField::constant(1.0),
    );
    let grid = TorusGrid::new(256, 64, 1.0)?;
    let pair = ResolventPair::new(&c, &grid, PreconditionerKind::Effective)?;
    let opts = SolveOptions::default().with_seed(7);
    let eps = [0.25, 0.125, 0.0625];
    let mut gaps = Vec::new();
    for &e in &eps {
        let run = pair.gap(e, &opts)?;
        println!(
            "eps {e:<7} gap {:.4e}  power its {:>3}  cg solves {:>3}",
            run.estimate.value, run.estimate.iterations, run.solves
        );
        gaps.push(run.estimate.value);
    }
    let fit = loglog_fit(&eps, &gaps)?;
    println!("slope {:.3}", fit.slope);
    Ok(())
}
