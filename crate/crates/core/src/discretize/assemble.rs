use num_complex::Complex64;

use crate::effective::EffectiveProfile;
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::scalar::Scalar;

use super::grid::TorusGrid;
use super::sparse::SparseOperator;

/// Point sampler `(x1, x2) ↦ value`.
pub type Sampler<'a> = &'a dyn Fn(f64, f64) -> f64;

/// Coefficients of a conservative five-point stencil on a torus grid.
///
/// `x1_links[p]` couples node `p = (i, j)` to `(i+1, j)`, `x2_links[p]` couples
/// it to `(i, j+1)`, and `diag[p]` is the zero-order term at the node.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilCoefficients {
    pub x1_links: Vec<f64>,
    pub x2_links: Vec<f64>,
    pub diag: Vec<f64>,
}

impl StencilCoefficients {
    /// Samples `a` at `(i+½, j)`, `b` at `(i, j+½)` and `q` at the nodes.
    /// With `fast = Some(m)` the `x1` argument is the fast variable `m·x1 mod 1`.
    pub fn sample(
        grid: &TorusGrid,
        a: Sampler,
        b: Sampler,
        q: Sampler,
        fast: Option<usize>,
    ) -> Self {
        let x1 = |l: usize| match fast {
            Some(m) => grid.fast_x1_half(l, m),
            None => grid.x1_half(l),
        };
        let n = grid.len();
        let mut x1_links = Vec::with_capacity(n);
        let mut x2_links = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for j in 0..grid.n2 {
            let x2 = grid.x2_half(2 * j);
            let x2_mid = grid.x2_half(2 * j + 1);
            for i in 0..grid.n1 {
                x1_links.push(a(x1(2 * i + 1), x2));
                x2_links.push(if grid.is_line() { 0.0 } else { b(x1(2 * i), x2_mid) });
                diag.push(q(x1(2 * i), x2));
            }
        }
        StencilCoefficients {
            x1_links,
            x2_links,
            diag,
        }
    }

    /// Rejects non-positive link coefficients and negative or non-finite
    /// zero-order terms.
    pub fn check(&self, grid: &TorusGrid) -> Result<()> {
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                let p = grid.index(i, j);
                let bad = |v: f64| !(v.is_finite() && v > 0.0);
                if bad(self.x1_links[p]) {
                    return Err(hypothesis("x1 coefficient", grid.x1_half(2 * i + 1), grid.x2(j), self.x1_links[p]));
                }
                if !grid.is_line() && bad(self.x2_links[p]) {
                    return Err(hypothesis("x2 coefficient", grid.x1(i), grid.x2_half(2 * j + 1), self.x2_links[p]));
                }
                if !(self.diag[p].is_finite() && self.diag[p] >= 0.0) {
                    return Err(hypothesis("zero-order term", grid.x1(i), grid.x2(j), self.diag[p]));
                }
            }
        }
        Ok(())
    }
}

fn hypothesis(field: &str, x1: f64, x2: f64, value: f64) -> Error {
    Error::Hypothesis {
        field: field.to_string(),
        x1,
        x2,
        value,
    }
}

/// Assembles the stencil. Every link contributes both triangles from one
/// source, so the result is exactly symmetric (Hermitian for a complex
/// `x1_phase`, which multiplies the coupling from `(i, j)` to `(i+1, j)`).
pub fn assemble_from_links<T: Scalar>(
    grid: &TorusGrid,
    coeffs: &StencilCoefficients,
    x1_phase: T,
) -> SparseOperator<T> {
    let n = grid.len();
    let ih1 = 1.0 / (grid.h1() * grid.h1());
    let ih2 = 1.0 / (grid.h2() * grid.h2());
    let mut triplets: Vec<(usize, usize, T)> = Vec::with_capacity(9 * n);
    let mut sums: Vec<T> = coeffs.diag.iter().map(|&d| T::from_real(d)).collect();
    let one = T::from_real(1.0);
    let mut link = |p: usize, q: usize, w: f64, phase: T| {
        triplets.push((p, p, T::from_real(w)));
        triplets.push((q, q, T::from_real(w)));
        triplets.push((p, q, -(phase.scale(w))));
        triplets.push((q, p, -(phase.conj().scale(w))));
        // zero for real links, so real row sums are exactly the zero-order term
        sums[p] += (one - phase).scale(w);
        sums[q] += (one - phase.conj()).scale(w);
    };
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let p = grid.index(i, j);
            link(p, grid.index((i + 1) % grid.n1, j), coeffs.x1_links[p] * ih1, x1_phase);
            if !grid.is_line() {
                link(p, grid.index(i, (j + 1) % grid.n2), coeffs.x2_links[p] * ih2, T::from_real(1.0));
            }
        }
    }
    for (p, &d) in coeffs.diag.iter().enumerate() {
        triplets.push((p, p, T::from_real(d)));
    }
    SparseOperator::from_triplets(n, triplets, grid.weight())
        .with_grid(*grid)
        .with_row_sums(sums)
}

/// Conservative five-point discretization of `D1 a D1 + D2 b D2 + q` with
/// periodic wrap in both directions.
pub fn assemble_divgrad(
    grid: &TorusGrid,
    a: Sampler,
    b: Sampler,
    q: Sampler,
) -> Result<SparseOperator<f64>> {
    let coeffs = StencilCoefficients::sample(grid, a, b, q, None);
    coeffs.check(grid)?;
    Ok(assemble_from_links(grid, &coeffs, 1.0))
}

/// Checks that `eps = 1/m` for an integer `m` and returns `m`.
pub fn reciprocal_integer(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::config(format!("ε = {eps} must lie in (0, 1]")));
    }
    let m = (1.0 / eps).round();
    if ((1.0 / m) - eps).abs() > 1e-12 * eps {
        return Err(Error::config(format!("ε = {eps} is not the reciprocal of an integer")));
    }
    Ok(m as usize)
}

/// Checks that the grid resolves `ε = 1/m` with at least 16 cells per period.
pub fn check_eps_grid(grid: &TorusGrid, eps: f64) -> Result<usize> {
    let m = reciprocal_integer(eps)?;
    if grid.n1 % m != 0 || grid.n1 < 16 * m {
        return Err(Error::config(format!(
            "grid n1 = {} is too coarse for ε = 1/{m} (need a multiple of {m} and at least {})",
            grid.n1,
            16 * m
        )));
    }
    Ok(m)
}

/// `A_ε + Q^ε` with coefficients `g1(x1/ε, x2)`, `g2(x1/ε, x2)`, `Q(x1/ε, x2)`.
pub fn assemble_eps_operator(
    grid: &TorusGrid,
    g1: &dyn ScalarField,
    g2: &dyn ScalarField,
    q: &dyn ScalarField,
    eps: f64,
) -> Result<SparseOperator<f64>> {
    let m = check_eps_grid(grid, eps)?;
    let coeffs = StencilCoefficients::sample(
        grid,
        &|x1, x2| g1.eval(x1, x2),
        &|x1, x2| g2.eval(x1, x2),
        &|x1, x2| q.eval(x1, x2),
        Some(m),
    );
    coeffs.check(grid)?;
    Ok(assemble_from_links(grid, &coeffs, 1.0))
}

/// Link coefficients of the effective operator `A⁰ + Q⁰` on `grid`.
///
/// The profile must be sampled on [`TorusGrid::x2_profile_nodes`]: even nodes
/// carry `g1⁰`, `Q⁰` for the grid rows, odd nodes carry `g2⁰` for the
/// staggered `x2` links.
pub fn effective_coefficients(
    profile: &EffectiveProfile,
    grid: &TorusGrid,
) -> Result<StencilCoefficients> {
    let nodes = grid.x2_profile_nodes();
    let matches = profile.x2_nodes.len() == nodes.len()
        && profile
            .x2_nodes
            .iter()
            .zip(&nodes)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * grid.period_x2);
    if !matches {
        return Err(Error::config(format!(
            "effective profile has {} nodes; grid needs the {} node and half-node x2 lines",
            profile.x2_nodes.len(),
            nodes.len()
        )));
    }
    let n = grid.len();
    let mut c = StencilCoefficients {
        x1_links: Vec::with_capacity(n),
        x2_links: Vec::with_capacity(n),
        diag: Vec::with_capacity(n),
    };
    for j in 0..grid.n2 {
        for _ in 0..grid.n1 {
            c.x1_links.push(profile.g1_eff[2 * j]);
            c.x2_links.push(profile.g2_eff[2 * j + 1]);
            c.diag.push(profile.q_eff[2 * j]);
        }
    }
    Ok(c)
}

/// `A⁰ + Q⁰` from an effective profile.
pub fn assemble_effective_operator(
    profile: &EffectiveProfile,
    grid: &TorusGrid,
) -> Result<SparseOperator<f64>> {
    let coeffs = effective_coefficients(profile, grid)?;
    coeffs.check(grid)?;
    Ok(assemble_from_links(grid, &coeffs, 1.0))
}

/// Diagonal multiplication operator.
pub fn multiplication_operator(values: &[f64], grid: &TorusGrid) -> Result<SparseOperator<f64>> {
    if values.len() != grid.len() {
        return Err(Error::config("multiplier length does not match grid"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite multiplier value {v}")));
    }
    Ok(SparseOperator::from_diagonal(values, grid.weight()).with_grid(*grid))
}

/// Fiber `(D1 + k) g1 (D1 + k) + ε² D2 g2 D2 + ε² Q` on one `x1` cell of the
/// strip, `x2` periodic. Quasimomentum enters as the phase `e^{ik·h1}` on `x1`
/// links.
pub fn assemble_fiber_operator(
    grid: &TorusGrid,
    g1: &dyn ScalarField,
    g2: &dyn ScalarField,
    q: &dyn ScalarField,
    eps: f64,
    k: f64,
) -> Result<SparseOperator<Complex64>> {
    check_quasimomentum(k)?;
    let e2 = eps * eps;
    let coeffs = StencilCoefficients::sample(
        grid,
        &|x1, x2| g1.eval(x1, x2),
        &|x1, x2| e2 * g2.eval(x1, x2),
        &|x1, x2| e2 * q.eval(x1, x2),
        None,
    );
    coeffs.check(grid)?;
    Ok(assemble_from_links(grid, &coeffs, bloch_phase(k, grid.h1())))
}

/// One-dimensional fiber `(D1 + k) g1(·, x2) (D1 + k)` on `n1` nodes.
pub fn assemble_slice_fiber(
    g1: &dyn ScalarField,
    x2: f64,
    k: f64,
    n1: usize,
) -> Result<SparseOperator<Complex64>> {
    check_quasimomentum(k)?;
    let grid = TorusGrid::line(n1)?;
    let coeffs = StencilCoefficients::sample(
        &grid,
        &|x1, _| g1.eval(x1, x2),
        &|_, _| 0.0,
        &|_, _| 0.0,
        None,
    );
    coeffs.check(&grid)?;
    Ok(assemble_from_links(&grid, &coeffs, bloch_phase(k, grid.h1())))
}

/// Phase `e^{ik·h1}` carried by `x1` links of a Bloch fiber.
pub fn bloch_phase(k: f64, h1: f64) -> Complex64 {
    Complex64::from_polar(1.0, k * h1)
}

fn check_quasimomentum(k: f64) -> Result<()> {
    if !(k.is_finite() && (-std::f64::consts::PI..=std::f64::consts::PI).contains(&k)) {
        return Err(Error::config(format!("quasimomentum {k} outside [−π, π]")));
    }
    Ok(())
}
