use crate::discretize::{
    assemble_eps_operator, assemble_from_links, effective_coefficients, SparseOperator, StencilCoefficients,
    TorusGrid,
};
use crate::effective::effective_profile;
use crate::error::Result;
use crate::fields::Coefficients;

use super::cg::{pcg, Jacobi, Preconditioner};
use super::fourier::EffectiveSolver;
use super::options::{PreconditionerKind, SolveOptions};
use super::power::{power_iteration, NormEstimate};

/// Quadrature tolerance used for effective profiles on solver grids.
pub const PROFILE_TOL: f64 = 1e-12;

/// Norm estimate of one resolvent difference plus the inner-solve statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRun {
    pub estimate: NormEstimate,
    /// total CG iterations over all inner solves
    pub cg_iterations: usize,
    /// largest true relative residual over all inner solves
    pub worst_residual: f64,
    pub solves: usize,
}

/// Effective operator `A⁰ + Q⁰` on a grid with its preconditioners, built
/// once and shared across `ε`.
pub struct EffectiveSide {
    pub grid: TorusGrid,
    pub coeffs: StencilCoefficients,
    pub op: SparseOperator<f64>,
    jacobi: Jacobi,
    fast: Option<EffectiveSolver>,
}

impl EffectiveSide {
    pub fn new(grid: &TorusGrid, coeffs: StencilCoefficients, kind: PreconditionerKind) -> Result<Self> {
        coeffs.check(grid)?;
        let op = assemble_from_links(grid, &coeffs, 1.0);
        let jacobi = Jacobi::new(&op)?;
        let fast = match kind {
            PreconditionerKind::Effective => Some(EffectiveSolver::new(grid, &coeffs)?),
            _ => None,
        };
        Ok(EffectiveSide {
            grid: *grid,
            coeffs,
            op,
            jacobi,
            fast,
        })
    }

    pub fn fast_solver(&self) -> Option<&EffectiveSolver> {
        self.fast.as_ref()
    }

    fn preconditioner(&self, kind: PreconditionerKind) -> &dyn Preconditioner<f64> {
        match (kind, &self.fast) {
            (PreconditionerKind::None, _) => &super::cg::Identity,
            (PreconditionerKind::Effective, Some(f)) => f,
            _ => &self.jacobi,
        }
    }
}

/// `z = w · P⁻¹(w · r)`, the preconditioner for `W⁻¹ A W⁻¹` given one for `A`.
pub struct Sandwiched<'a> {
    pub inner: &'a dyn Preconditioner<f64>,
    pub w: &'a [f64],
}

impl Preconditioner<f64> for Sandwiched<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let wr: Vec<f64> = r.iter().zip(self.w).map(|(a, b)| a * b).collect();
        self.inner.apply(&wr, z);
        z.iter_mut().zip(self.w).for_each(|(a, b)| *a *= b);
    }
}

/// Power iteration on `D = fine⁻¹ − W·coarse⁻¹·W` (`W = I` without a sandwich).
pub fn difference_norm(
    fine: &SparseOperator<f64>,
    fine_pre: &dyn Preconditioner<f64>,
    coarse: &EffectiveSide,
    sandwich: Option<&[f64]>,
    opts: &SolveOptions,
) -> Result<GapRun> {
    opts.check()?;
    let n = fine.dim();
    let cap = opts.iteration_cap(n);
    let coarse_pre = coarse.preconditioner(opts.preconditioner);
    let mut cg_iterations = 0;
    let mut worst_residual = 0.0_f64;
    let mut solves = 0;
    let mut apply = |x: &[f64], y: &mut [f64]| -> Result<()> {
        let a = pcg(fine, x, fine_pre, opts.rel_tol, cap)?;
        let rhs: Vec<f64> = match sandwich {
            Some(w) => x.iter().zip(w).map(|(a, b)| a * b).collect(),
            None => x.to_vec(),
        };
        let b = pcg(&coarse.op, &rhs, coarse_pre, opts.rel_tol, cap)?;
        for out in [&a, &b] {
            cg_iterations += out.iterations;
            worst_residual = worst_residual.max(out.rel_residual);
            solves += 1;
        }
        for i in 0..n {
            let wb = match sandwich {
                Some(w) => w[i] * b.solution[i],
                None => b.solution[i],
            };
            y[i] = a.solution[i] - wb;
        }
        Ok(())
    };
    let estimate = power_iteration(&mut apply, n, fine.weight(), opts)?;
    Ok(GapRun {
        estimate,
        cg_iterations,
        worst_residual,
        solves,
    })
}

/// Original and effective problems on one grid, for `ε`-sweeps of the
/// resolvent difference `(A_ε + Q^ε)⁻¹ − (A⁰ + Q⁰)⁻¹`.
pub struct ResolventPair {
    pub coefficients: Coefficients,
    pub effective: EffectiveSide,
}

impl ResolventPair {
    pub fn new(coefficients: &Coefficients, grid: &TorusGrid, kind: PreconditionerKind) -> Result<Self> {
        let c = coefficients;
        let profile = effective_profile(&c.g1, &c.g2, &c.q, &grid.x2_profile_nodes(), PROFILE_TOL)?;
        let coeffs = effective_coefficients(&profile, grid)?;
        Ok(ResolventPair {
            coefficients: c.clone(),
            effective: EffectiveSide::new(grid, coeffs, kind)?,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.effective.grid
    }

    pub fn gap(&self, eps: f64, opts: &SolveOptions) -> Result<GapRun> {
        let c = &self.coefficients;
        let fine = assemble_eps_operator(self.grid(), &c.g1, &c.g2, &c.q, eps)?;
        let jacobi;
        let pre: &dyn Preconditioner<f64> = match (opts.preconditioner, self.effective.fast_solver()) {
            (PreconditionerKind::None, _) => &super::cg::Identity,
            (PreconditionerKind::Effective, Some(f)) => f,
            _ => {
                jacobi = Jacobi::new(&fine)?;
                &jacobi
            }
        };
        difference_norm(&fine, pre, &self.effective, None, opts)
    }
}

/// Norm of `(A_ε + Q^ε)⁻¹ − (A⁰ + Q⁰)⁻¹` on `grid`, estimated by power iteration.
pub fn resolvent_gap(
    coefficients: &Coefficients,
    grid: &TorusGrid,
    eps: f64,
    opts: &SolveOptions,
) -> Result<NormEstimate> {
    let pair = ResolventPair::new(coefficients, grid, opts.preconditioner)?;
    Ok(pair.gap(eps, opts)?.estimate)
}
