use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Preconditioner used by the conjugate-gradient solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionerKind {
    None,
    #[default]
    Jacobi,
    /// Exact inverse of the effective operator (FFT in `x1`, cyclic
    /// tridiagonal solves in `x2`).
    Effective,
}

/// Solver settings shared by linear solves, power iteration and inverse iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub rel_tol: f64,
    /// `None` means `10 · dimension`.
    pub max_iter: Option<usize>,
    pub preconditioner: PreconditionerKind,
    pub seed: u64,
    /// Relative change of the norm estimate at which power iteration stops.
    pub power_tol: f64,
    pub power_max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: 1e-10,
            max_iter: None,
            preconditioner: PreconditionerKind::Jacobi,
            seed: 0,
            power_tol: 1e-4,
            power_max_iter: 200,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_preconditioner(mut self, kind: PreconditionerKind) -> Self {
        self.preconditioner = kind;
        self
    }

    pub fn iteration_cap(&self, dim: usize) -> usize {
        self.max_iter.unwrap_or(10 * dim.max(1))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::config("rel_tol must be positive"));
        }
        if self.max_iter == Some(0) || self.power_max_iter == 0 {
            return Err(Error::config("iteration caps must be at least 1"));
        }
        if !(self.power_tol > 0.0) {
            return Err(Error::config("power_tol must be positive"));
        }
        Ok(())
    }
}
