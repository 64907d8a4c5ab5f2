//! Numerical toolkit for operator error estimates in periodic homogenization
//! of elliptic operators on a cylinder-like domain, oscillating in `x1` only.
//!
//! The library discretizes `A_ε = D1 g1(x1/ε, x2) D1 + D2 g2(x1/ε, x2) D2 + Q(x1/ε, x2)`
//! on a periodic grid, builds its homogenized counterpart, and measures how
//! fast the resolvents approach each other as `ε → 0`. Bloch-fiber
//! diagnostics and a ground-state factorization for singular Schrödinger
//! operators sit on top of the same machinery.

pub mod bloch;
pub mod discretize;
pub mod effective;
pub mod error;
pub mod fields;
pub mod fit;
pub mod harness;
pub mod linsolve;
pub mod scalar;
pub mod schrodinger;

pub use error::{Error, Result};
