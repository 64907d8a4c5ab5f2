//! Finite-difference assembly on periodic grids.

mod assemble;
mod grid;
mod sparse;

pub use assemble::{
    assemble_divgrad, assemble_effective_operator, assemble_eps_operator, assemble_fiber_operator,
    assemble_from_links, assemble_slice_fiber, check_eps_grid, effective_coefficients,
    multiplication_operator, reciprocal_integer, Sampler, StencilCoefficients,
};
pub use assemble::bloch_phase;
pub use grid::TorusGrid;
pub use sparse::{ScalarKind, SparseOperator};
