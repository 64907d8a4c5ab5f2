use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, period_x1) × [0, period_x2)`.
///
/// Nodes are indexed `j·n1 + i`. A grid with `n2 == 1` is a line in `x1` at a
/// fixed `x2` (no `x2` links, inner-product weight `h1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n1: usize,
    pub n2: usize,
    pub period_x1: f64,
    pub period_x2: f64,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize, period_x2: f64) -> Result<Self> {
        Self::with_periods(n1, n2, 1.0, period_x2)
    }

    pub fn with_periods(n1: usize, n2: usize, period_x1: f64, period_x2: f64) -> Result<Self> {
        if n1 < 4 || !(n2 == 1 || n2 >= 4) {
            return Err(Error::config(format!(
                "grid {n1}×{n2} is too small (need at least 4 nodes per direction)"
            )));
        }
        if !(period_x1 > 0.0 && period_x2 > 0.0) {
            return Err(Error::config("grid periods must be positive"));
        }
        Ok(TorusGrid {
            n1,
            n2,
            period_x1,
            period_x2,
        })
    }

    /// One-dimensional grid along `x1` (used for slice fibers and ground states).
    pub fn line(n1: usize) -> Result<Self> {
        Self::with_periods(n1, 1, 1.0, 1.0)
    }

    pub fn is_line(&self) -> bool {
        self.n2 == 1
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h1(&self) -> f64 {
        self.period_x1 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        self.period_x2 / self.n2 as f64
    }

    /// Quadrature weight of one node in the discrete L2 inner product.
    pub fn weight(&self) -> f64 {
        if self.is_line() {
            self.h1()
        } else {
            self.h1() * self.h2()
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    /// `x1` coordinate of the half-grid line `l` (nodes are even `l`).
    pub fn x1_half(&self, l: usize) -> f64 {
        l as f64 * self.period_x1 / (2 * self.n1) as f64
    }

    /// `x2` coordinate of the half-grid line `l` (nodes are even `l`).
    pub fn x2_half(&self, l: usize) -> f64 {
        l as f64 * self.period_x2 / (2 * self.n2) as f64
    }

    pub fn x1(&self, i: usize) -> f64 {
        self.x1_half(2 * i)
    }

    pub fn x2(&self, j: usize) -> f64 {
        self.x2_half(2 * j)
    }

    /// Node and half-node `x2` lines, the default effective-profile nodes.
    pub fn x2_profile_nodes(&self) -> Vec<f64> {
        (0..2 * self.n2).map(|l| self.x2_half(l)).collect()
    }

    /// Fast-variable coordinate `x1/ε` of half-line `l` for `ε = 1/m`, reduced
    /// exactly into `[0, 1)` so that samples repeat bit-for-bit every period.
    pub fn fast_x1_half(&self, l: usize, m: usize) -> f64 {
        // x1 = l·P/(2 n1); only unit periods are reduced exactly.
        if self.period_x1 == 1.0 {
            let den = 2 * self.n1;
            ((l * m) % den) as f64 / den as f64
        } else {
            (self.x1_half(l) * m as f64).rem_euclid(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_weight() {
        let g = TorusGrid::new(8, 16, 2.0).unwrap();
        assert_eq!(g.h1(), 0.125);
        assert_eq!(g.h2(), 0.125);
        assert_eq!(g.weight(), 0.125 * 0.125);
        assert_eq!(g.index(3, 2), 19);
        assert_eq!(g.x2(3), 0.375);
        assert_eq!(g.x2_profile_nodes().len(), 32);
        assert!(TorusGrid::new(3, 8, 1.0).is_err());
        assert!(TorusGrid::new(8, 2, 1.0).is_err());
        let l = TorusGrid::line(64).unwrap();
        assert_eq!(l.weight(), 1.0 / 64.0);
    }

    #[test]
    fn fast_coordinate_is_exactly_periodic() {
        let g = TorusGrid::new(64, 4, 1.0).unwrap();
        for l in 0..(2 * 64 - 32) {
            assert_eq!(g.fast_x1_half(l, 4), g.fast_x1_half(l + 32, 4));
        }
    }
}
