use crate::scalar::{inner, Scalar};

use super::grid::TorusGrid;

/// Which scalar field an operator is assembled over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Symmetric (real) or Hermitian (complex) matrix in compressed-row form.
///
/// `weight` is the node weight of the discrete L2 inner product the operator
/// is self-adjoint in; plain matrices use weight 1.
///
/// Assembled stencils also carry their exact row sums. Products are then
/// formed as `y_r = s_r·x_r + Σ_{c≠r} m_rc·(x_c − x_r)`, so the flux part maps
/// constants to zero without rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    weight: f64,
    grid: Option<TorusGrid>,
    row_sums: Option<Vec<T>>,
}

impl<T: Scalar> SparseOperator<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// input order.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>, weight: f64) -> Self {
        // stable: equal keys keep their emission order, so sums are reproducible
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}×{dim}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            dim,
            row_ptr,
            cols,
            vals,
            weight,
            grid: None,
            row_sums: None,
        }
    }

    pub fn from_diagonal(diag: &[T], weight: f64) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), triplets, weight)
    }

    pub fn with_grid(mut self, grid: TorusGrid) -> Self {
        self.weight = grid.weight();
        self.grid = Some(grid);
        self
    }

    /// Attaches exact row sums (the zero-order part of a stencil).
    pub fn with_row_sums(mut self, sums: Vec<T>) -> Self {
        assert_eq!(sums.len(), self.dim);
        self.row_sums = Some(sums);
        self
    }

    pub fn row_sums(&self) -> Option<&[T]> {
        self.row_sums.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn grid(&self) -> Option<&TorusGrid> {
        self.grid.as_ref()
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        if T::IS_COMPLEX {
            ScalarKind::Complex
        } else {
            ScalarKind::Real
        }
    }

    /// `y ← M x`
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        if let Some(sums) = &self.row_sums {
            for (r, yr) in y.iter_mut().enumerate() {
                let xr = x[r];
                let mut acc = sums[r] * xr;
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    let c = self.cols[k];
                    if c != r {
                        acc += self.vals[k] * (x[c] - xr);
                    }
                }
                *yr = acc;
            }
            return;
        }
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.apply(x, &mut y);
        y
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    /// `max |M − Mᴴ|` over stored entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r).conj()).abs());
            }
        }
        worst
    }

    /// Weighted Rayleigh quotient `⟨Mu, u⟩ / ⟨u, u⟩` (real part).
    pub fn rayleigh(&self, u: &[T]) -> f64 {
        let mu = self.mul_vec(u);
        inner(&mu, u, self.weight).re() / inner(u, u, self.weight).re()
    }

    /// Gershgorin enclosure `(lower, upper)` of the (real) spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut centre = 0.0;
            let mut radius = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    centre = v.re();
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n * n];
        for r in 0..n {
            for (c, v) in self.row(r) {
                out[r * n + c] = v;
            }
        }
        out
    }

    /// `D · M · D` for a real diagonal `D`.
    pub fn congruence(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        out.row_sums = None;
        for r in 0..self.dim {
            for k in out.row_ptr[r]..out.row_ptr[r + 1] {
                out.vals[k] = out.vals[k].scale(d[r] * d[out.cols[k]]);
            }
        }
        out
    }

    /// Adds a real diagonal in place (pattern must already contain the diagonal).
    pub fn add_diagonal(&mut self, d: &[f64]) {
        for (r, &dr) in d.iter().enumerate() {
            let range = self.row_ptr[r]..self.row_ptr[r + 1];
            let k = self.cols[range.clone()]
                .binary_search(&r)
                .expect("diagonal entry missing from pattern");
            self.vals[range.start + k] += T::from_real(dr);
            if let Some(sums) = &mut self.row_sums {
                sums[r] += T::from_real(dr);
            }
        }
    }

    /// Product `self · other` of two operators with compatible dimensions.
    pub fn compose(&self, other: &Self) -> Self {
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            for (m, a) in self.row(r) {
                for (c, b) in other.row(m) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        let mut out = Self::from_triplets(self.dim, triplets, self.weight);
        out.grid = self.grid;
        out
    }

    /// Entry-wise scaling by a real number.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = v.scale(s));
        if let Some(sums) = &mut out.row_sums {
            sums.iter_mut().for_each(|v| *v = v.scale(s));
        }
        out
    }
}
