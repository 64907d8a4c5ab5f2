//! Iterative linear and eigen solvers, dense reference oracles, and
//! operator-norm estimation for resolvent differences.

mod cg;
mod eigen;
mod fourier;
mod gap;
mod options;
mod power;

pub use cg::{cg_solve, pcg, CgOutcome, Identity, Jacobi, Preconditioner};
pub use eigen::{
    dense_eigen, dense_eigenvalues, dense_hermitian_norm, residual, smallest_eigenpair, DenseSpectrum,
    EIGEN_RESIDUAL_TOL,
};
pub use fourier::EffectiveSolver;
pub use gap::{difference_norm, resolvent_gap, EffectiveSide, GapRun, ResolventPair, Sandwiched, PROFILE_TOL};
pub use options::{PreconditionerKind, SolveOptions};
pub use power::{power_iteration, NormEstimate};
