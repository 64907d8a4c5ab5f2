//! Effective coefficients of the homogenized operator: harmonic mean of `g1`
//! and arithmetic means of `g2` and `Q` over one `x1` period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;

/// Quadrature depth budget for adaptive Simpson.
const MAX_DEPTH: u32 = 48;

/// x2-profiles of the effective coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveProfile {
    pub x2_nodes: Vec<f64>,
    pub g1_eff: Vec<f64>,
    pub g2_eff: Vec<f64>,
    pub q_eff: Vec<f64>,
    pub quadrature_tol: f64,
}

impl EffectiveProfile {
    pub fn len(&self) -> usize {
        self.x2_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x2_nodes.is_empty()
    }
}

/// `(∫₀¹ g(x1, x2)⁻¹ dx1)⁻¹`
pub fn harmonic_mean_x1(g: &dyn ScalarField, x2: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if g.is_x1_constant() {
        return Ok(g.eval(0.0, x2));
    }
    let recip = |x1: f64| 1.0 / g.eval(x1, x2);
    let inv = match g.native_x1_nodes() {
        Some(n) => periodic_trapezoid(recip, n),
        None => {
            // Scale the absolute target so the error on the reciprocal stays ≤ tol.
            let rough = 1.0 / periodic_trapezoid(recip, 16);
            piecewise_simpson(&recip, &g.jumps_x1(), tol / (rough * rough).max(1.0))?
        }
    };
    Ok(1.0 / inv)
}

/// `∫₀¹ f(x1, x2) dx1`
pub fn arithmetic_mean_x1(f: &dyn ScalarField, x2: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if f.is_x1_constant() {
        return Ok(f.eval(0.0, x2));
    }
    let g = |x1: f64| f.eval(x1, x2);
    match f.native_x1_nodes() {
        Some(n) => Ok(periodic_trapezoid(g, n)),
        None => piecewise_simpson(&g, &f.jumps_x1(), tol),
    }
}

/// Effective profile on the given `x2` nodes.
pub fn effective_profile(
    g1: &dyn ScalarField,
    g2: &dyn ScalarField,
    q: &dyn ScalarField,
    x2_nodes: &[f64],
    tol: f64,
) -> Result<EffectiveProfile> {
    if x2_nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("profile nodes must be strictly increasing"));
    }
    let mut g1_eff = Vec::with_capacity(x2_nodes.len());
    let mut g2_eff = Vec::with_capacity(x2_nodes.len());
    let mut q_eff = Vec::with_capacity(x2_nodes.len());
    for &x2 in x2_nodes {
        g1_eff.push(harmonic_mean_x1(g1, x2, tol)?);
        g2_eff.push(arithmetic_mean_x1(g2, x2, tol)?);
        q_eff.push(arithmetic_mean_x1(q, x2, tol)?);
    }
    Ok(EffectiveProfile {
        x2_nodes: x2_nodes.to_vec(),
        g1_eff,
        g2_eff,
        q_eff,
        quadrature_tol: tol,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::config(format!("quadrature tolerance {tol} must be positive")));
    }
    Ok(())
}

/// Mean over `[0, 1)` of `f` sampled at `n` uniform nodes. Exact for piecewise
/// linear periodic interpolants on those nodes.
fn periodic_trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    (0..n).map(|i| f(i as f64 / n as f64)).sum::<f64>() / n as f64
}

/// Trapezoid doubling for smooth periodic integrands, where convergence is
/// geometric. `None` when two successive refinements do not settle.
fn smooth_periodic(f: &dyn Fn(f64) -> f64, tol: f64) -> Option<f64> {
    let mut n = 16;
    let mut prev = periodic_trapezoid(f, n);
    let mut prev_diff = f64::INFINITY;
    while n < 4096 {
        n *= 2;
        let next = periodic_trapezoid(f, n);
        let diff = (next - prev).abs();
        if diff <= tol && prev_diff <= tol.sqrt() {
            return Some(next);
        }
        prev = next;
        prev_diff = diff;
    }
    None
}

/// Adaptive Simpson over `[0, 1]`, split at the declared jump abscissae.
fn piecewise_simpson(f: &dyn Fn(f64) -> f64, jumps: &[f64], tol: f64) -> Result<f64> {
    if jumps.is_empty() {
        if let Some(v) = smooth_periodic(f, tol) {
            return Ok(v);
        }
    }
    let mut cuts: Vec<f64> = vec![0.0];
    let mut inner: Vec<f64> = jumps.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.extend(inner);
    cuts.push(1.0);
    let pieces = (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        // Integrate strictly inside each piece so jump-point averages never enter.
        total += adaptive_simpson(f, w[0], w[1], tol / pieces, !jumps.is_empty())?;
    }
    Ok(total)
}

/// Adaptive Simpson with absolute tolerance `tol` on `[a, b]`.
///
/// With `open_ends`, the endpoint samples are replaced by one-sided limits
/// taken just inside the interval, which is exact for piecewise-constant data.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    open_ends: bool,
) -> Result<f64> {
    let nudge = if open_ends { (b - a) * 1e-14 } else { 0.0 };
    let fa = f(a + nudge);
    let fb = f(b - nudge);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut worst = 0.0_f64;
    let value = simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut worst);
    if worst > tol {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature".into(),
            iterations: MAX_DEPTH as usize,
            achieved: worst,
        });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Depth floor: periodic integrands can fool the first coarse comparison.
    if depth < MAX_DEPTH - 3 && delta.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 {
            *worst = worst.max(delta.abs() / 15.0);
        }
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{CoefficientField, Family};

    #[test]
    fn harmonic_mean_examples() {
        let c = CoefficientField::constant(3.7);
        assert_eq!(harmonic_mean_x1(&c, 0.2, 1e-12).unwrap(), 3.7);
        let cos = CoefficientField::x1_cosine(2.0, 1.0);
        let h = harmonic_mean_x1(&cos, 0.0, 1e-12).unwrap();
        assert!((h - 3f64.sqrt()).abs() < 1e-10, "{h}");
        let two = CoefficientField::two_phase(1.0, 4.0);
        assert!((harmonic_mean_x1(&two, 0.0, 1e-12).unwrap() - 1.6).abs() < 1e-14);
    }

    #[test]
    fn harmonic_mean_matches_brute_force_simpson() {
        // composite Simpson on 2^20 panels as an independent oracle
        let n = 1usize << 20;
        let h = 1.0 / n as f64;
        let f = |x: f64| 1.0 / (2.0 + (2.0 * std::f64::consts::PI * x).cos());
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let oracle = 1.0 / (s * h / 3.0);
        let cos = CoefficientField::x1_cosine(2.0, 1.0);
        let h = harmonic_mean_x1(&cos, 0.0, 1e-12).unwrap();
        assert!((h - oracle).abs() < 1e-10);
    }

    #[test]
    fn arithmetic_mean_examples() {
        let cos = CoefficientField::x1_cosine(2.0, 1.0);
        assert!((arithmetic_mean_x1(&cos, 0.3, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        let two = CoefficientField::two_phase(1.0, 4.0);
        assert!((arithmetic_mean_x1(&two, 0.3, 1e-12).unwrap() - 2.5).abs() < 1e-14);
        // (2 + sin 2πx2) + cos 2πx1 at x2 = 1/4
        let f = CoefficientField::new(Family::X1Cosine, vec![2.0, 1.0, 1.0, 0.0], 1.0).unwrap();
        assert!((arithmetic_mean_x1(&f, 0.25, 1e-12).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_profiles_use_trapezoid() {
        let t = CoefficientField::tabulated(vec![1.0, 3.0, 1.0, 3.0]).unwrap();
        assert!((arithmetic_mean_x1(&t, 0.0, 1e-12).unwrap() - 2.0).abs() < 1e-15);
        let h = harmonic_mean_x1(&t, 0.0, 1e-12).unwrap();
        assert!((h - 1.5).abs() < 1e-15);
    }

    #[test]
    fn profile_examples() {
        let nodes: Vec<f64> = (0..256).map(|j| j as f64 / 256.0).collect();
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let q = CoefficientField::new(
            Family::X1Cosine,
            vec![1.0, 0.0, 0.0, 0.5, std::f64::consts::FRAC_PI_2],
            1.0,
        )
        .unwrap();
        let p = effective_profile(&g, &g, &q, &nodes, 1e-12).unwrap();
        for i in 0..nodes.len() {
            assert!((p.g1_eff[i] - 3f64.sqrt()).abs() < 1e-10);
            assert!((p.g2_eff[i] - 2.0).abs() < 1e-12);
            assert!((p.q_eff[i] - 1.0).abs() < 1e-12);
        }
        // x1-independent fields give back their values
        let f = CoefficientField::new(Family::X1Cosine, vec![2.0, 0.0, 0.5, 0.0], 1.0).unwrap();
        let p = effective_profile(&f, &f, &f, &nodes, 1e-12).unwrap();
        for (i, &x2) in nodes.iter().enumerate() {
            assert_eq!(p.g1_eff[i], f.eval(0.0, x2));
            assert_eq!(p.q_eff[i], f.eval(0.0, x2));
        }
    }

    #[test]
    fn unsorted_nodes_rejected() {
        let c = CoefficientField::constant(1.0);
        assert!(effective_profile(&c, &c, &c, &[0.5, 0.1], 1e-12).is_err());
        assert!(harmonic_mean_x1(&c, 0.0, 0.0).is_err());
    }
}
