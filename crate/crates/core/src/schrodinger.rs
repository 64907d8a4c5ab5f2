//! Ground-state factorization of a Schrödinger operator with a singular,
//! rapidly oscillating potential `ε⁻²V(x1/ε, x2)`.
//!
//! With `g_j = g̃_j ω²`, `V = −(D1 g̃1 D1 ω)/ω`, `V2 = −(D2 g̃2 D2 ω)/ω` and
//! `Q_λ = (λ − V2) ω²` one has `H_ε + λ = W⁻¹ (A_ε + Q_λ^ε) W⁻¹` where `W` is
//! multiplication by `ω^ε`, so the resolvent of `H_ε` is approximated by
//! `W (A⁰ + Q_λ⁰)⁻¹ W`.
//!
//! Two discretizations of the potentials are offered. The analytic path uses
//! closed-form derivatives of `ω` and natural link coefficients `g̃`. The
//! discrete path defines the potentials through the assembled flux operators
//! so that the factorization holds exactly on the grid: on the torus, `H_ε`
//! carries the links `g̃ω²(mid)/(ω_p·ω_q)` and the potential `−(K1 ω)/ω`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::{
    assemble_from_links, check_eps_grid, SparseOperator, StencilCoefficients, TorusGrid,
};
use crate::effective::{arithmetic_mean_x1, effective_profile};
use crate::error::{Error, Result};
use crate::fields::{CoefficientField, Family, FnField, ScalarField};
use crate::linsolve::{
    dense_eigen, difference_norm, GapRun, Jacobi, NormEstimate, PreconditionerKind, Preconditioner, Sandwiched,
    SolveOptions, EffectiveSide, PROFILE_TOL,
};
use crate::discretize::effective_coefficients;
use crate::scalar::{inner, Scalar};

/// How the potentials `V`, `V2` are discretized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialPath {
    Analytic,
    #[default]
    Discrete,
}

/// Tolerance of the per-slice normalization `∫₀¹ ω² dx1 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// `g̃1`, `g̃2`, the ground state `ω` and its bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationData {
    pub g1_t: CoefficientField,
    pub g2_t: CoefficientField,
    pub omega: CoefficientField,
    pub omega0: f64,
    pub omega1: f64,
    /// `(x2, λ(x2))` spectral shifts found when `ω` was recovered from a potential
    pub lambda_shift: Vec<(f64, f64)>,
}

impl FactorizationData {
    /// Samples `ω` on `density` points per unit length, records its bounds, and
    /// checks the normalization on every sampled `x2` line.
    pub fn new(
        g1_t: CoefficientField,
        g2_t: CoefficientField,
        omega: CoefficientField,
        density: usize,
    ) -> Result<Self> {
        let period = omega.period_x2;
        let n2 = ((density as f64) * period).ceil().max(1.0) as usize;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n2 {
            let x2 = j as f64 * period / n2 as f64;
            for i in 0..density {
                let x1 = i as f64 / density as f64;
                let w = omega.eval(x1, x2);
                if !(w.is_finite() && w > 0.0) {
                    return Err(hypothesis("omega", x1, x2, w));
                }
                lo = lo.min(w);
                hi = hi.max(w);
                for (name, g) in [("g1~", &g1_t), ("g2~", &g2_t)] {
                    let v = g.eval(x1, x2);
                    if !(v.is_finite() && v > 0.0) {
                        return Err(hypothesis(name, x1, x2, v));
                    }
                }
            }
            let norm = omega_squared_mean(&omega, x2)?;
            if (norm - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::config(format!(
                    "ω is not normalized on x2 = {x2}: ∫ω² dx1 = {norm}"
                )));
            }
        }
        Ok(FactorizationData {
            g1_t,
            g2_t,
            omega,
            omega0: lo,
            omega1: hi,
            lambda_shift: Vec::new(),
        })
    }

    /// Recovers `ω` from a potential given on `n1` nodes of one period (the
    /// inverse path): shifts `V` by the bottom of the spectrum of
    /// `D1 g̃1 D1 + V` and tabulates the positive ground state. `g̃1` and `V`
    /// must not depend on `x2`.
    pub fn from_potential(
        g1_t: CoefficientField,
        g2_t: CoefficientField,
        v_nodes: &[f64],
        density: usize,
    ) -> Result<Self> {
        for j in 0..8 {
            let x2 = j as f64 * g1_t.period_x2 / 8.0;
            if (0..16).any(|i| g1_t.jet(i as f64 / 16.0, x2).d2 != 0.0) {
                return Err(Error::config("the inverse path needs g̃1 independent of x2"));
            }
        }
        let gs = ground_state(&g1_t, v_nodes, 0.0)?;
        let omega = tabulated_omega(&gs.omega)?.with_period(g1_t.period_x2);
        let mut data = FactorizationData::new(g1_t, g2_t, omega, density)?;
        data.lambda_shift = vec![(0.0, gs.lambda)];
        Ok(data)
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

fn omega_squared_mean(omega: &CoefficientField, x2: f64) -> Result<f64> {
    let sq = FnField::new(|a, b| {
        let w = omega.eval(a, b);
        w * w
    })
    .with_jumps(kinks(omega));
    arithmetic_mean_x1(&sq, x2, 1e-13)
}

/// Kinks of `ω` in `x1` (nodes of tabulated profiles).
fn kinks(omega: &CoefficientField) -> Vec<f64> {
    match omega.family {
        Family::Tabulated => {
            let n = omega.params.len();
            (0..n).map(|i| i as f64 / n as f64).collect()
        }
        _ => omega.jumps_x1(),
    }
}

/// Periodic linear interpolant of positive ground-state nodes, rescaled so
/// that the interpolant itself satisfies `∫₀¹ ω² dx1 = 1`.
pub fn tabulated_omega(nodes: &[f64]) -> Result<CoefficientField> {
    let n = nodes.len();
    // exact integral of the squared linear interpolant
    let sq: f64 = (0..n)
        .map(|i| {
            let (a, b) = (nodes[i], nodes[(i + 1) % n]);
            (a * a + a * b + b * b) / 3.0
        })
        .sum::<f64>()
        / n as f64;
    let s = 1.0 / sq.sqrt();
    CoefficientField::tabulated(nodes.iter().map(|v| v * s).collect())
}

/// Closed-form `V = (∂1 g̃1 ∂1 ω + g̃1 ∂11 ω)/ω`.
pub fn analytic_v(g1_t: &CoefficientField, omega: &CoefficientField, x1: f64, x2: f64) -> f64 {
    let g = g1_t.jet(x1, x2);
    let w = omega.jet(x1, x2);
    (g.d1 * w.d1 + g.value * w.d11) / w.value
}

/// Closed-form `V2 = (∂2 g̃2 ∂2 ω + g̃2 ∂22 ω)/ω`.
pub fn analytic_v2(g2_t: &CoefficientField, omega: &CoefficientField, x1: f64, x2: f64) -> f64 {
    let g = g2_t.jet(x1, x2);
    let w = omega.jet(x1, x2);
    (g.d2 * w.d2 + g.value * w.d22) / w.value
}

/// Node values of `V` and `V2` on a cell grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Potentials {
    pub path: PotentialPath,
    pub grid: TorusGrid,
    pub v: Vec<f64>,
    pub v2: Vec<f64>,
}

/// `V`, `V2` on a unit-period grid. The discrete path solves
/// `(L̃1 ω)_p + V_p ω_p = 0` and `(L̃2 ω)_p + V2_p ω_p = 0` pointwise, where
/// `L̃j` are the assembled flux operators with links `g̃j` at half nodes.
pub fn potentials_from_ground_state(
    g1_t: &CoefficientField,
    g2_t: &CoefficientField,
    omega: &CoefficientField,
    path: PotentialPath,
    grid: &TorusGrid,
) -> Result<Potentials> {
    let w: Vec<f64> = node_values(grid, |x1, x2| omega.eval(x1, x2));
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let p = grid.index(i, j);
            if !(w[p] > 0.0) {
                return Err(hypothesis("omega", grid.x1(i), grid.x2(j), w[p]));
            }
        }
    }
    let (v, v2) = match path {
        PotentialPath::Analytic => (
            node_values(grid, |x1, x2| analytic_v(g1_t, omega, x1, x2)),
            node_values(grid, |x1, x2| analytic_v2(g2_t, omega, x1, x2)),
        ),
        PotentialPath::Discrete => {
            let c = StencilCoefficients::sample(
                grid,
                &|x1, x2| g1_t.eval(x1, x2),
                &|x1, x2| g2_t.eval(x1, x2),
                &|_, _| 0.0,
                None,
            );
            let (k1, k2) = flux_parts(grid, &c, &w);
            (
                k1.iter().zip(&w).map(|(a, b)| -a / b).collect(),
                k2.iter().zip(&w).map(|(a, b)| -a / b).collect(),
            )
        }
    };
    Ok(Potentials {
        path,
        grid: *grid,
        v,
        v2,
    })
}

fn node_values(grid: &TorusGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            out.push(f(grid.x1(i), grid.x2(j)));
        }
    }
    out
}

/// `(K1 u, K2 u)`: the `x1` and `x2` flux parts of the five-point operator with
/// the given links applied to `u`.
fn flux_parts(grid: &TorusGrid, c: &StencilCoefficients, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ih1 = 1.0 / (grid.h1() * grid.h1());
    let ih2 = 1.0 / (grid.h2() * grid.h2());
    let mut k1 = vec![0.0; grid.len()];
    let mut k2 = vec![0.0; grid.len()];
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let p = grid.index(i, j);
            let q = grid.index((i + 1) % grid.n1, j);
            let f = c.x1_links[p] * ih1 * (u[p] - u[q]);
            k1[p] += f;
            k1[q] -= f;
            if !grid.is_line() {
                let q = grid.index(i, (j + 1) % grid.n2);
                let f = c.x2_links[p] * ih2 * (u[p] - u[q]);
                k2[p] += f;
                k2[q] -= f;
            }
        }
    }
    (k1, k2)
}

/// Positive ground state of one slice operator `D1 g̃1 D1 + V`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    pub x2: f64,
    /// bottom of the spectrum, `λ(x2)`
    pub lambda: f64,
    /// positive nodes normalized by `h·Σω² = 1`
    pub omega: Vec<f64>,
    /// `‖(H − λ)ω‖` in the grid norm
    pub residual: f64,
}

/// Slice operator `D1 g̃1(·, x2) D1 + V` on `v_nodes.len()` nodes.
pub fn slice_operator(g1_t: &CoefficientField, v_nodes: &[f64], x2: f64) -> Result<SparseOperator<f64>> {
    let grid = TorusGrid::line(v_nodes.len())?;
    let c = StencilCoefficients::sample(&grid, &|x1, _| g1_t.eval(x1, x2), &|_, _| 0.0, &|_, _| 0.0, None);
    let mut c = c;
    c.diag = vec![0.0; grid.len()];
    c.check(&grid)?;
    c.diag = v_nodes.to_vec();
    Ok(assemble_from_links(&grid, &c, 1.0))
}

/// Samples a field on the `n1` nodes of the slice at `x2`.
pub fn sample_slice(f: &dyn ScalarField, x2: f64, n1: usize) -> Vec<f64> {
    (0..n1).map(|i| f.eval(i as f64 / n1 as f64, x2)).collect()
}

/// Lowest eigenpair of the slice operator, with the eigenvector made positive
/// and normalized. A sign change means the eigensolver failed.
pub fn ground_state(g1_t: &CoefficientField, v_nodes: &[f64], x2: f64) -> Result<GroundState> {
    let n1 = v_nodes.len();
    if n1 < 64 {
        return Err(Error::config(format!("ground states need n1 ≥ 64, got {n1}")));
    }
    let op = slice_operator(g1_t, v_nodes, x2)?;
    let spec = dense_eigen(&op);
    let lambda = spec.values[0];
    let mut omega = spec.vectors[0].clone();
    if omega.iter().sum::<f64>() < 0.0 {
        omega.iter_mut().for_each(|v| *v = -*v);
    }
    let min = omega.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::Numerical(format!(
            "ground state changes sign (min {min:e}); eigensolver failure"
        )));
    }
    let h = 1.0 / n1 as f64;
    let s = 1.0 / (h * omega.iter().map(|v| v * v).sum::<f64>()).sqrt();
    omega.iter_mut().for_each(|v| *v *= s);
    let hw = op.mul_vec(&omega);
    let r: Vec<f64> = hw.iter().zip(&omega).map(|(a, b)| a - lambda * b).collect();
    let residual = crate::scalar::norm(&r, h);
    Ok(GroundState {
        x2,
        lambda,
        omega,
        residual,
    })
}

/// Factorization data with a spectral parameter on a torus grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SchrodingerScenario {
    pub data: FactorizationData,
    pub path: PotentialPath,
    pub grid: TorusGrid,
    pub lambda: f64,
    /// `sup |V2|` over the samples
    pub c4_t: f64,
    /// `λ·ω0² − ω1²·c̃4`
    pub margin: f64,
}

impl SchrodingerScenario {
    /// With `lambda = None` the default `λ = (ω1²c̃4 + max(½, ½ω1²c̃4))/ω0²` is
    /// used, which leaves a margin of at least `max(½, ½ω1²c̃4)`.
    pub fn new(
        data: FactorizationData,
        path: PotentialPath,
        lambda: Option<f64>,
        grid: TorusGrid,
        density: usize,
    ) -> Result<Self> {
        if path == PotentialPath::Analytic && !data.omega.is_smooth_x1() {
            return Err(Error::config("the analytic path needs a smooth ω; use the discrete path"));
        }
        let mut scn = SchrodingerScenario {
            data,
            path,
            grid,
            lambda: 0.0,
            c4_t: 0.0,
            margin: 0.0,
        };
        let mut c4 = 0.0_f64;
        for j in 0..grid.n2 {
            let x2 = grid.x2(j);
            for i in 0..density {
                c4 = c4.max(scn.v2_at(i as f64 / density as f64, x2).abs());
            }
        }
        let (w0, w1) = (scn.data.omega0, scn.data.omega1);
        let lambda = lambda.unwrap_or((w1 * w1 * c4 + (0.5_f64).max(0.5 * w1 * w1 * c4)) / (w0 * w0));
        let margin = lambda * w0 * w0 - w1 * w1 * c4;
        if !(margin > 0.0) {
            return Err(Error::config(format!(
                "positivity margin λ·ω0² − ω1²·c̃4 = {margin} is not positive (λ = {lambda}, c̃4 = {c4})"
            )));
        }
        scn.lambda = lambda;
        scn.c4_t = c4;
        scn.margin = margin;
        Ok(scn)
    }

    pub fn omega(&self, x1: f64, x2: f64) -> f64 {
        self.data.omega.eval(x1, x2)
    }

    /// `g_j = g̃_j ω²` for `j ∈ {1, 2}`.
    pub fn g(&self, j: usize, x1: f64, x2: f64) -> f64 {
        let w = self.omega(x1, x2);
        let gt = if j == 1 { &self.data.g1_t } else { &self.data.g2_t };
        gt.eval(x1, x2) * w * w
    }

    /// `V2` as used by this scenario's discretization.
    pub fn v2_at(&self, x1: f64, x2: f64) -> f64 {
        match self.path {
            PotentialPath::Analytic => analytic_v2(&self.data.g2_t, &self.data.omega, x1, x2),
            PotentialPath::Discrete => {
                // −(K2 ω)/ω with links g̃2ω²(mid)/(ω_p ω_q), matching the torus H_ε
                let h = self.grid.h2();
                let w = self.omega(x1, x2);
                let mut flux = 0.0;
                for s in [1.0, -1.0] {
                    let wq = self.omega(x1, x2 + s * h);
                    let kappa = self.g(2, x1, x2 + 0.5 * s * h) / (w * wq);
                    flux += kappa * (w - wq);
                }
                -flux / (h * h * w)
            }
        }
    }

    /// `Q_λ = (λ − V2)·ω²`.
    pub fn q_lambda(&self, x1: f64, x2: f64) -> f64 {
        let w = self.omega(x1, x2);
        (self.lambda - self.v2_at(x1, x2)) * w * w
    }

    fn jumps(&self) -> Vec<f64> {
        kinks(&self.data.omega)
    }

    /// `A⁰ + Q_λ⁰` on the scenario grid.
    pub fn effective_side(&self, kind: PreconditionerKind) -> Result<EffectiveSide> {
        let g1 = FnField::new(|a, b| self.g(1, a, b)).with_jumps(self.jumps());
        let g2 = FnField::new(|a, b| self.g(2, a, b)).with_jumps(self.jumps());
        let q = FnField::new(|a, b| self.q_lambda(a, b)).with_jumps(self.jumps());
        let profile = effective_profile(&g1, &g2, &q, &self.grid.x2_profile_nodes(), PROFILE_TOL)?;
        EffectiveSide::new(&self.grid, effective_coefficients(&profile, &self.grid)?, kind)
    }

    /// Node values of `ω^ε`.
    pub fn omega_eps(&self, eps: f64) -> Result<Vec<f64>> {
        let m = check_eps_grid(&self.grid, eps)?;
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.len());
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                out.push(self.omega(g.fast_x1_half(2 * i, m), g.x2(j)));
            }
        }
        Ok(out)
    }

    fn factorized_links(&self, m: usize) -> StencilCoefficients {
        StencilCoefficients::sample(
            &self.grid,
            &|a, b| self.g(1, a, b),
            &|a, b| self.g(2, a, b),
            &|a, b| self.q_lambda(a, b),
            Some(m),
        )
    }

    /// `A_ε + Q_λ^ε` with `g_j = g̃_j ω²`.
    pub fn factorized_operator(&self, eps: f64) -> Result<SparseOperator<f64>> {
        let m = check_eps_grid(&self.grid, eps)?;
        let c = self.factorized_links(m);
        c.check(&self.grid)?;
        Ok(assemble_from_links(&self.grid, &c, 1.0))
    }

    /// `H_ε + λ`, assembled as a Schrödinger operator (kinetic links plus a
    /// potential on the diagonal).
    pub fn schrodinger_operator(&self, eps: f64) -> Result<SparseOperator<f64>> {
        let m = check_eps_grid(&self.grid, eps)?;
        let g = &self.grid;
        let mut c = match self.path {
            PotentialPath::Discrete => {
                let a = self.factorized_links(m);
                let w = self.omega_eps(eps)?;
                let mut k = a.clone();
                for j in 0..g.n2 {
                    for i in 0..g.n1 {
                        let p = g.index(i, j);
                        k.x1_links[p] = a.x1_links[p] / (w[p] * w[g.index((i + 1) % g.n1, j)]);
                        k.x2_links[p] = a.x2_links[p] / (w[p] * w[g.index(i, (j + 1) % g.n2)]);
                    }
                }
                let (k1, _) = flux_parts(g, &k, &w);
                k.diag = k1.iter().zip(&w).map(|(f, wp)| -f / wp + self.lambda).collect();
                k
            }
            PotentialPath::Analytic => {
                let d = &self.data;
                let m2 = (m * m) as f64;
                StencilCoefficients::sample(
                    g,
                    &|a, b| d.g1_t.eval(a, b),
                    &|a, b| d.g2_t.eval(a, b),
                    &|a, b| m2 * analytic_v(&d.g1_t, &d.omega, a, b) + self.lambda,
                    Some(m),
                )
            }
        };
        // the potential may be negative; only the links need checking
        let diag = std::mem::replace(&mut c.diag, vec![0.0; g.len()]);
        c.check(g)?;
        c.diag = diag;
        Ok(assemble_from_links(g, &c, 1.0))
    }
}

/// The Schrödinger problem and its sandwiched effective approximation,
/// built once for an `ε`-sweep.
pub struct SchrodingerPair {
    pub scenario: SchrodingerScenario,
    pub effective: EffectiveSide,
}

impl SchrodingerPair {
    pub fn new(scenario: SchrodingerScenario, kind: PreconditionerKind) -> Result<Self> {
        let effective = scenario.effective_side(kind)?;
        Ok(SchrodingerPair { scenario, effective })
    }

    /// Norm of `(H_ε + λ)⁻¹ − ω^ε (A⁰ + Q_λ⁰)⁻¹ ω^ε`.
    pub fn gap(&self, eps: f64, opts: &SolveOptions) -> Result<GapRun> {
        let fine = self.scenario.schrodinger_operator(eps)?;
        let w = self.scenario.omega_eps(eps)?;
        let jacobi;
        let sandwich;
        let pre: &dyn Preconditioner<f64> = match (opts.preconditioner, self.effective.fast_solver()) {
            (PreconditionerKind::None, _) => &crate::linsolve::Identity,
            (PreconditionerKind::Effective, Some(f)) => {
                sandwich = Sandwiched { inner: f, w: &w };
                &sandwich
            }
            _ => {
                jacobi = Jacobi::new(&fine)?;
                &jacobi
            }
        };
        difference_norm(&fine, pre, &self.effective, Some(&w), opts)
    }
}

/// Norm of `(H_ε + λ)⁻¹ − ω^ε (A⁰ + Q_λ⁰)⁻¹ ω^ε` by power iteration.
pub fn schrodinger_resolvent_gap(
    scn: &SchrodingerScenario,
    eps: f64,
    opts: &SolveOptions,
) -> Result<NormEstimate> {
    let pair = SchrodingerPair::new(scn.clone(), opts.preconditioner)?;
    Ok(pair.gap(eps, opts)?.estimate)
}

/// Largest relative discrepancy between `⟨(H_ε+λ)u, u⟩` and
/// `⟨(A_ε + Q_λ^ε)W⁻¹u, W⁻¹u⟩` over seeded random grid vectors.
pub fn factorization_check(scn: &SchrodingerScenario, eps: f64, trials: usize, seed: u64) -> Result<f64> {
    let h = scn.schrodinger_operator(eps)?;
    let a = scn.factorized_operator(eps)?;
    let w = scn.omega_eps(eps)?;
    let weight = scn.grid.weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let u: Vec<f64> = (0..h.dim()).map(|_| f64::random(&mut rng)).collect();
        let lhs = inner(&h.mul_vec(&u), &u, weight);
        let v: Vec<f64> = u.iter().zip(&w).map(|(x, y)| x / y).collect();
        let rhs = inner(&a.mul_vec(&v), &v, weight);
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_omega_has_no_potential() {
        let one = CoefficientField::constant(1.0);
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let grid = TorusGrid::new(16, 16, 1.0).unwrap();
        for path in [PotentialPath::Analytic, PotentialPath::Discrete] {
            let p = potentials_from_ground_state(&g, &g, &one, path, &grid).unwrap();
            assert!(p.v.iter().chain(&p.v2).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn exp_gibbs_potential_closed_form() {
        let one = CoefficientField::constant(1.0);
        let s = 0.5;
        let w = CoefficientField::exp_gibbs(s);
        for i in 0..20 {
            let x = i as f64 / 20.0;
            let expected = 4.0 * PI * PI * s * (s * (2.0 * PI * x).sin().powi(2) - (2.0 * PI * x).cos());
            let v = analytic_v(&one, &w, x, 0.3);
            assert!((v - expected).abs() < 1e-10);
            // central-difference cross-check of ω''/ω
            let d = 1e-4;
            let fd = (w.eval(x + d, 0.3) - 2.0 * w.eval(x, 0.3) + w.eval(x - d, 0.3)) / (d * d) / w.eval(x, 0.3);
            assert!((fd - expected).abs() < 1e-5 * expected.abs().max(1.0), "{fd} vs {expected}");
        }
    }

    #[test]
    fn discrete_potential_residual_vanishes() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let w = CoefficientField::exp_gibbs(0.5);
        let grid = TorusGrid::line(64).unwrap();
        let p = potentials_from_ground_state(&g, &g, &w, PotentialPath::Discrete, &grid).unwrap();
        let op = slice_operator(&g, &p.v, 0.0).unwrap();
        let omega = sample_slice(&w, 0.0, 64);
        let r = op.mul_vec(&omega);
        let scale = op.gershgorin().1;
        assert!(r.iter().all(|x| x.abs() <= 1e-13 * scale), "{r:?}");
    }

    #[test]
    fn ground_state_of_free_slice_is_constant() {
        let one = CoefficientField::constant(1.0);
        let gs = ground_state(&one, &[0.0; 64], 0.0).unwrap();
        assert!(gs.lambda.abs() < 1e-10);
        assert!(gs.omega.iter().all(|w| (w - 1.0).abs() < 1e-10));
    }

    #[test]
    fn ground_state_recovers_exp_gibbs() {
        let one = CoefficientField::constant(1.0);
        let w = CoefficientField::exp_gibbs(0.5);
        let grid = TorusGrid::line(128).unwrap();
        let p = potentials_from_ground_state(&one, &one, &w, PotentialPath::Discrete, &grid).unwrap();
        let gs = ground_state(&one, &p.v, 0.0).unwrap();
        assert!(gs.lambda.abs() <= 1e-8);
        assert!(gs.residual <= 1e-8);
        let exact = sample_slice(&w, 0.0, 128);
        let sup = gs.omega.iter().zip(&exact).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(sup < 1e-6, "{sup}");
        // spectral shift
        let shifted: Vec<f64> = p.v.iter().map(|v| v + 1.0).collect();
        let gs1 = ground_state(&one, &shifted, 0.0).unwrap();
        assert!((gs1.lambda - gs.lambda - 1.0).abs() < 1e-8);
        let d = gs1.omega.iter().zip(&gs.omega).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(d < 1e-8);
    }

    #[test]
    fn margin_violation_is_config_error() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let w = CoefficientField::new(Family::ExpGibbs, vec![0.5, 0.1], 1.0).unwrap();
        let data = FactorizationData::new(g.clone(), g, w, 64).unwrap();
        let grid = TorusGrid::new(64, 16, 1.0).unwrap();
        let r = SchrodingerScenario::new(data, PotentialPath::Discrete, Some(0.0), grid, 64);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn factorization_exact_on_discrete_path() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let w = CoefficientField::new(Family::ExpGibbs, vec![0.5, 0.1], 1.0).unwrap();
        let data = FactorizationData::new(g.clone(), g, w, 64).unwrap();
        let grid = TorusGrid::new(64, 32, 1.0).unwrap();
        let scn = SchrodingerScenario::new(data, PotentialPath::Discrete, None, grid, 64).unwrap();
        assert!(scn.margin >= 0.5);
        let d = factorization_check(&scn, 0.25, 4, 7).unwrap();
        assert!(d <= 1e-12, "{d}");
    }

    #[test]
    fn inverse_path_tabulates_normalized_omega() {
        let one = CoefficientField::constant(1.0);
        let w = CoefficientField::exp_gibbs(0.5);
        let grid = TorusGrid::line(128).unwrap();
        let p = potentials_from_ground_state(&one, &one, &w, PotentialPath::Discrete, &grid).unwrap();
        let data = FactorizationData::from_potential(one.clone(), one, &p.v, 64).unwrap();
        assert_eq!(data.omega.family, Family::Tabulated);
        assert!(data.lambda_shift[0].1.abs() < 1e-8);
        assert!(data.omega0 > 0.0);
    }
}
