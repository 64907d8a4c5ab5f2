//! Floquet–Bloch diagnostics: slice and strip fiber operators, the spectral
//! germ at the band bottom, threshold checks, projection residuals,
//! consistency of the direct-integral decomposition, and the fiber-resolvent
//! approximation by the germ operator.
//!
//! Quasimomentum enters the discrete fibers as a phase `e^{ik·h1}` on `x1`
//! links, so the discrete counterpart of `t² = k²` is the symbol
//! `t_h² = (4/h1²)·sin²(k·h1/2)` returned by [`discrete_symbol`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretize::{
    assemble_fiber_operator, assemble_from_links, assemble_slice_fiber, bloch_phase, SparseOperator,
    StencilCoefficients, TorusGrid,
};
use crate::effective::{effective_profile, harmonic_mean_x1};
use crate::error::{Error, Result};
use crate::fields::{validate_hypotheses, CoefficientField, Coefficients, HypothesisConstants};
use crate::fit::loglog_fit;
use crate::linsolve::{
    dense_eigen, dense_eigenvalues, dense_hermitian_norm, pcg, power_iteration, Jacobi, NormEstimate,
    SolveOptions, PROFILE_TOL,
};
use crate::scalar::Scalar;

const PI: f64 = std::f64::consts::PI;

/// Lowest eigenpair of a fiber operator.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberEigenpair {
    pub k: f64,
    /// slice coordinate for one-dimensional fibers
    pub x2: Option<f64>,
    pub eigenvalue: f64,
    /// unit vector in the grid-weighted norm
    pub eigenvector: Vec<Complex64>,
}

/// Band-bottom ratios `λ_min(k)/k²` for one slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermReport {
    pub x2: f64,
    pub k_values: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `g1⁰(x2)`, the harmonic mean of `g1` over one period
    pub germ_value: f64,
    /// fitted exponent of `|ratio − germ_value|` in `|k|` (absent when fewer than
    /// two distinct nonzero deviations are available)
    pub residual_order: Option<f64>,
}

/// Lowest fiber eigenvalues against the isolation thresholds `δ` and `3δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub k: f64,
    pub x2: f64,
    pub lowest: Vec<f64>,
    pub delta: f64,
    pub pass: bool,
}

/// Comparison of the super-torus spectrum with the union of fiber spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub eps: f64,
    pub cells: usize,
    pub count: usize,
    pub quasimomenta: Vec<f64>,
    /// the `count·cells` lowest eigenvalues of the super-torus operator
    pub super_lowest: Vec<f64>,
    /// the `count·cells` lowest eigenvalues over all fiber spectra
    pub fiber_lowest: Vec<f64>,
    /// max deviation between the two lists above
    pub max_deviation: f64,
    /// max deviation between the complete spectra
    pub full_deviation: f64,
    pub pass: bool,
}

/// Absolute tolerance of the decomposition check.
pub const DECOMPOSITION_TOL: f64 = 1e-7;

/// `(4/h²)·sin²(k·h/2)`, the discrete counterpart of `k²`.
pub fn discrete_symbol(k: f64, h: f64) -> f64 {
    let s = (0.5 * k * h).sin();
    4.0 * s * s / (h * h)
}

/// `points` equally spaced quasimomenta on `[−t0, t0]`.
pub fn k_grid(t0: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| -t0 + 2.0 * t0 * i as f64 / (points - 1) as f64)
        .collect()
}

/// Threshold constants computed from `g1` alone (`c3, c4, c5` are placeholders).
pub fn slice_constants(g1: &CoefficientField, density: usize) -> Result<HypothesisConstants> {
    let one = CoefficientField::constant(1.0).with_period(g1.period_x2);
    validate_hypotheses(g1, g1, &one, density.max(64))
}

fn check_window(k: f64, constants: &HypothesisConstants) -> Result<()> {
    if k.abs() > constants.t0 * (1.0 + 1e-12) {
        return Err(Error::config(format!(
            "quasimomentum {k} lies outside the window |k| ≤ t0 = {}",
            constants.t0
        )));
    }
    Ok(())
}

fn check_slice_resolution(n1: usize) -> Result<()> {
    if n1 < 64 {
        return Err(Error::config(format!("slice fibers need n1 ≥ 64, got {n1}")));
    }
    Ok(())
}

/// Lowest eigenpair of the slice fiber `(D1 + k) g1(·, x2) (D1 + k)`.
pub fn slice_band_bottom(g1: &CoefficientField, x2: f64, k: f64, n1: usize) -> Result<FiberEigenpair> {
    let op = assemble_slice_fiber(g1, x2, k, n1)?;
    let mut spec = dense_eigen(&op);
    Ok(FiberEigenpair {
        k,
        x2: Some(x2),
        eigenvalue: spec.values[0],
        eigenvector: spec.vectors.swap_remove(0),
    })
}

/// Spectral-germ check: `λ_min(k)/k² → g1⁰(x2)` with an `O(k²)` deviation.
pub fn germ_check(g1: &CoefficientField, x2: f64, k_list: &[f64], n1: usize) -> Result<GermReport> {
    check_slice_resolution(n1)?;
    if k_list.iter().any(|&k| k == 0.0) {
        return Err(Error::config("k = 0 has no germ ratio; test the kernel separately"));
    }
    let constants = slice_constants(g1, n1)?;
    for &k in k_list {
        check_window(k, &constants)?;
    }
    let germ_value = harmonic_mean_x1(g1, x2, PROFILE_TOL)?;
    let mut ratios = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let bottom = slice_band_bottom(g1, x2, k, n1)?;
        ratios.push(bottom.eigenvalue / (k * k));
    }
    let (ks, devs): (Vec<f64>, Vec<f64>) = k_list
        .iter()
        .zip(&ratios)
        .map(|(k, r)| (k.abs(), (r - germ_value).abs()))
        .filter(|(_, d)| *d > 0.0)
        .unzip();
    let distinct = ks.iter().any(|&k| (k - ks[0]).abs() > 0.0);
    let residual_order = if distinct {
        Some(loglog_fit(&ks, &devs)?.slope)
    } else {
        None
    };
    Ok(GermReport {
        x2,
        k_values: k_list.to_vec(),
        ratios,
        germ_value,
        residual_order,
    })
}

/// Exactly one fiber eigenvalue in `[0, δ]` and none in `(δ, 3δ)`.
pub fn gap_check(
    g1: &CoefficientField,
    x2: f64,
    k: f64,
    constants: &HypothesisConstants,
    n1: usize,
) -> Result<GapCheck> {
    check_slice_resolution(n1)?;
    check_window(k, constants)?;
    let op = assemble_slice_fiber(g1, x2, k, n1)?;
    let lowest: Vec<f64> = dense_eigenvalues(&op).into_iter().take(3).collect();
    let d = constants.delta;
    let below = lowest.iter().filter(|&&l| l <= d).count();
    let inside = lowest.iter().filter(|&&l| l > d && l < 3.0 * d).count();
    Ok(GapCheck {
        k,
        x2,
        pass: below == 1 && inside == 0,
        lowest,
        delta: d,
    })
}

/// Discrete norms of `Φ = (F − P̃)/t` and `Ψ = (A1·F − t²·g1⁰·P̃)/t³`, where `F`
/// projects onto the band-bottom eigenvector, `P̃` onto constants, and
/// `t = t_h` is the discrete quasimomentum.
pub fn projection_residual(g1: &CoefficientField, x2: f64, k: f64, n1: usize) -> Result<(f64, f64)> {
    check_slice_resolution(n1)?;
    if k == 0.0 {
        return Err(Error::config("projection residuals need k ≠ 0"));
    }
    let constants = slice_constants(g1, n1)?;
    check_window(k, &constants)?;
    let germ = harmonic_mean_x1(g1, x2, PROFILE_TOL)?;
    let bottom = slice_band_bottom(g1, x2, k, n1)?;
    let h = 1.0 / n1 as f64;
    let t2 = discrete_symbol(k, h);
    let t = t2.sqrt();
    let u = &bottom.eigenvector;
    let mut phi = vec![Complex64::new(0.0, 0.0); n1 * n1];
    let mut psi = vec![Complex64::new(0.0, 0.0); n1 * n1];
    for r in 0..n1 {
        for c in 0..n1 {
            let f = u[r] * u[c].conj() * h;
            phi[r * n1 + c] = f - h;
            psi[r * n1 + c] = f * bottom.eigenvalue - t2 * germ * h;
        }
    }
    Ok((
        dense_hermitian_norm(n1, &phi) / t,
        dense_hermitian_norm(n1, &psi) / (t2 * t),
    ))
}

/// Quasimomenta `2πj/M` realized on an `M`-cell super-torus, mapped to `[−π, π)`.
pub fn super_torus_quasimomenta(cells: usize) -> Vec<f64> {
    (0..cells)
        .map(|j| {
            let k = 2.0 * PI * j as f64 / cells as f64;
            if k >= PI {
                k - 2.0 * PI
            } else {
                k
            }
        })
        .collect()
}

fn fiber_stencil(c: &Coefficients, grid: &TorusGrid, eps: f64) -> Result<StencilCoefficients> {
    let e2 = eps * eps;
    let s = StencilCoefficients::sample(
        grid,
        &|x1, x2| c.g1.eval(x1, x2),
        &|x1, x2| e2 * c.g2.eval(x1, x2),
        &|x1, x2| e2 * c.q.eval(x1, x2),
        None,
    );
    s.check(grid)?;
    Ok(s)
}

/// The operator `A(ε) + ε²Q` (unit cell in `x1`) on an `M`-cell super-torus
/// with `M·n1 × n2` nodes.
pub fn super_torus_operator(
    c: &Coefficients,
    eps: f64,
    cells: usize,
    n1: usize,
    n2: usize,
) -> Result<SparseOperator<f64>> {
    let cell = TorusGrid::new(n1, n2, c.g1.period_x2)?;
    let s = fiber_stencil(c, &cell, eps)?;
    let grid = TorusGrid::with_periods(cells * n1, n2, cells as f64, c.g1.period_x2)?;
    let mut tiled = StencilCoefficients {
        x1_links: Vec::with_capacity(grid.len()),
        x2_links: Vec::with_capacity(grid.len()),
        diag: Vec::with_capacity(grid.len()),
    };
    for j in 0..n2 {
        let row = j * n1..(j + 1) * n1;
        for _ in 0..cells {
            tiled.x1_links.extend_from_slice(&s.x1_links[row.clone()]);
            tiled.x2_links.extend_from_slice(&s.x2_links[row.clone()]);
            tiled.diag.extend_from_slice(&s.diag[row.clone()]);
        }
    }
    Ok(assemble_from_links(&grid, &tiled, 1.0))
}

/// Discrete direct-integral check: the super-torus operator block-diagonalizes
/// over the quasimomenta it realizes, so its spectrum is the union of the fiber
/// spectra.
pub fn fiber_decomposition_check(
    c: &Coefficients,
    eps: f64,
    cells: usize,
    n1: usize,
    n2: usize,
    count: usize,
) -> Result<DecompositionReport> {
    if cells < 2 {
        return Err(Error::config("the super-torus needs at least 2 cells"));
    }
    if count == 0 || count > 8 {
        return Err(Error::config(format!("count = {count} must lie in 1..=8")));
    }
    let sup = dense_eigenvalues(&super_torus_operator(c, eps, cells, n1, n2)?);
    let cell = TorusGrid::new(n1, n2, c.g1.period_x2)?;
    let s = fiber_stencil(c, &cell, eps)?;
    let ks = super_torus_quasimomenta(cells);
    let mut union = Vec::with_capacity(sup.len());
    for &k in &ks {
        let op = assemble_from_links(&cell, &s, bloch_phase(k, cell.h1()));
        union.extend(dense_eigenvalues(&op));
    }
    union.sort_by(f64::total_cmp);
    let take = count * cells;
    let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let max_deviation = dev(&sup[..take], &union[..take]);
    let full_deviation = dev(&sup, &union);
    Ok(DecompositionReport {
        eps,
        cells,
        count,
        quasimomenta: ks,
        super_lowest: sup[..take].to_vec(),
        fiber_lowest: union[..take].to_vec(),
        max_deviation,
        full_deviation,
        pass: max_deviation <= DECOMPOSITION_TOL && sup.len() == union.len(),
    })
}

/// `S(k, ε) + ε²Q⁰ = g1⁰·t_h² + ε² D2 g2⁰ D2 + ε² Q⁰` on the `x2` grid.
pub fn germ_operator(
    c: &Coefficients,
    eps: f64,
    k: f64,
    n1: usize,
    n2: usize,
) -> Result<SparseOperator<Complex64>> {
    let grid = TorusGrid::new(n1, n2, c.g1.period_x2)?;
    let profile = effective_profile(&c.g1, &c.g2, &c.q, &grid.x2_profile_nodes(), PROFILE_TOL)?;
    let line = TorusGrid::with_periods(n2, 1, c.g1.period_x2, 1.0)?;
    let e2 = eps * eps;
    let t2 = discrete_symbol(k, grid.h1());
    let coeffs = StencilCoefficients {
        x1_links: (0..n2).map(|j| e2 * profile.g2_eff[2 * j + 1]).collect(),
        x2_links: vec![0.0; n2],
        diag: (0..n2)
            .map(|j| profile.g1_eff[2 * j] * t2 + e2 * profile.q_eff[2 * j])
            .collect(),
    };
    coeffs.check(&line)?;
    Ok(assemble_from_links(&line, &coeffs, Complex64::new(1.0, 0.0)))
}

/// Norm of `(A(k,ε) + ε²Q)⁻¹ − (S(k,ε) + ε²Q⁰)⁻¹P` on an `n1 × n2` strip
/// fiber, where `P` averages over `x1`.
pub fn germ_resolvent_gap(
    c: &Coefficients,
    eps: f64,
    k: f64,
    n1: usize,
    n2: usize,
    opts: &SolveOptions,
) -> Result<NormEstimate> {
    let grid = TorusGrid::new(n1, n2, c.g1.period_x2)?;
    let fiber = assemble_fiber_operator(&grid, &c.g1, &c.g2, &c.q, eps, k)?;
    let germ = germ_operator(c, eps, k, n1, n2)?;
    let fiber_pre = Jacobi::new(&fiber)?;
    let germ_pre = Jacobi::new(&germ)?;
    let cap_f = opts.iteration_cap(fiber.dim());
    let cap_g = opts.iteration_cap(germ.dim());
    let h1 = grid.h1();
    let mut apply = |x: &[Complex64], y: &mut [Complex64]| -> Result<()> {
        let a = pcg(&fiber, x, &fiber_pre, opts.rel_tol, cap_f)?.solution;
        let mean: Vec<Complex64> = (0..n2)
            .map(|j| {
                let mut s = Complex64::new(0.0, 0.0);
                for v in &x[j * n1..(j + 1) * n1] {
                    s += v;
                }
                s * h1
            })
            .collect();
        let b = pcg(&germ, &mean, &germ_pre, opts.rel_tol, cap_g)?.solution;
        for j in 0..n2 {
            for i in 0..n1 {
                let p = j * n1 + i;
                y[p] = a[p] - b[j];
            }
        }
        Ok(())
    };
    power_iteration(&mut apply, grid.len(), grid.weight(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Family;

    #[test]
    fn unit_coefficient_germ_is_one() {
        let g = CoefficientField::constant(1.0);
        let r = germ_check(&g, 0.0, &[0.05, 0.1, 0.2, 0.4], 128).unwrap();
        assert_eq!(r.germ_value, 1.0);
        let h = 1.0 / 128.0;
        for (k, ratio) in r.k_values.iter().zip(&r.ratios) {
            assert!((ratio - 1.0).abs() <= k * k * h * h, "{ratio}");
        }
    }

    #[test]
    fn cosine_germ_near_sqrt3() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let r = germ_check(&g, 0.0, &[0.05], 64).unwrap();
        assert!((r.ratios[0] - 3f64.sqrt()).abs() < 0.01);
    }

    #[test]
    fn two_phase_ratios_approach_harmonic_mean() {
        let g = CoefficientField::two_phase(1.0, 4.0);
        let r = germ_check(&g, 0.0, &[0.4, 0.2, 0.1, 0.05], 128).unwrap();
        let devs: Vec<f64> = r.ratios.iter().map(|x| (x - 1.6).abs()).collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
        assert!(devs[3] < 1e-2);
    }

    #[test]
    fn zero_quasimomentum_rejected() {
        let g = CoefficientField::constant(1.0);
        assert!(matches!(germ_check(&g, 0.0, &[0.0, 0.1], 64), Err(Error::Config(_))));
    }

    #[test]
    fn gap_check_unit_examples() {
        let g = CoefficientField::constant(1.0);
        let c = slice_constants(&g, 64).unwrap();
        let at0 = gap_check(&g, 0.0, 0.0, &c, 64).unwrap();
        assert!(at0.pass && at0.lowest[0].abs() < 1e-10);
        let edge = gap_check(&g, 0.0, c.t0, &c, 64).unwrap();
        assert!(edge.pass);
        assert!(edge.lowest[0] <= c.delta);
        assert!(edge.lowest[1] > 22.0);
    }

    #[test]
    fn projection_residuals_vanish_for_unit_coefficient() {
        let g = CoefficientField::constant(1.0);
        let (phi, psi) = projection_residual(&g, 0.0, 0.3, 64).unwrap();
        assert!(phi <= 1e-8 && psi <= 1e-8, "{phi} {psi}");
    }

    #[test]
    fn phi_is_scale_invariant() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let (a, _) = projection_residual(&g, 0.0, 0.2, 64).unwrap();
        let (b, _) = projection_residual(&g.scaled(2.0), 0.0, 0.2, 64).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn quasimomenta_of_four_cells() {
        let k = super_torus_quasimomenta(4);
        assert_eq!(k, vec![0.0, 0.5 * PI, -PI, -0.5 * PI]);
    }

    #[test]
    fn constant_decomposition_matches_symbols() {
        let one = CoefficientField::constant(1.0);
        let c = Coefficients::new(one.clone(), one.clone(), one);
        let r = fiber_decomposition_check(&c, 0.25, 4, 8, 8, 2).unwrap();
        assert!(r.pass, "{r:?}");
        // lowest eigenvalue: k = 0, constant mode, ε²Q
        assert!((r.super_lowest[0] - 0.0625).abs() < 1e-10);
    }

    #[test]
    fn germ_gap_vanishes_for_x1_independent_data() {
        let f = CoefficientField::new(Family::X1Cosine, vec![2.0, 0.0, 0.5, 0.0], 1.0).unwrap();
        let c = Coefficients::new(f.clone(), f.clone(), f);
        let opts = SolveOptions::default();
        // restricted to x1-constants the two sides coincide; the P⊥ block stays
        let est = germ_resolvent_gap(&c, 0.25, 0.3, 16, 16, &opts).unwrap();
        let bound = 1.0 / (1.5 * discrete_symbol(2.0 * PI - 0.3, 1.0 / 16.0));
        assert!(est.value <= bound * (1.0 + 1e-6), "{} vs {bound}", est.value);
    }
}
