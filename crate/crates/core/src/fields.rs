//! Coefficient fields on the plane, 1-periodic in `x1` and `period_x2`-periodic
//! in `x2`, together with the sampled hypothesis constants they satisfy.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Built-in closed-form families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "x1-cosine")]
    X1Cosine,
    #[serde(rename = "two-phase")]
    TwoPhase,
    #[serde(rename = "separable-product")]
    SeparableProduct,
    #[serde(rename = "exp-gibbs")]
    ExpGibbs,
    #[serde(rename = "tabulated-1d-profile")]
    Tabulated,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Constant,
        Family::X1Cosine,
        Family::TwoPhase,
        Family::SeparableProduct,
        Family::ExpGibbs,
        Family::Tabulated,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::X1Cosine => "x1-cosine",
            Family::TwoPhase => "two-phase",
            Family::SeparableProduct => "separable-product",
            Family::ExpGibbs => "exp-gibbs",
            Family::Tabulated => "tabulated-1d-profile",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == tag)
            .ok_or_else(|| Error::config(format!("unknown field family `{tag}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Value and partial derivatives of a field at one point.
///
/// `d1`, `d11` are taken in `x1`, `d2`, `d22` in `x2`. For families with jumps in
/// `x1` the `x1` derivatives are the one-sided classical ones away from the jumps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d11: f64,
    pub d2: f64,
    pub d22: f64,
}

impl Jet {
    fn scaled(self, s: f64) -> Jet {
        Jet {
            value: s * self.value,
            d1: s * self.d1,
            d11: s * self.d11,
            d2: s * self.d2,
            d22: s * self.d22,
        }
    }
}

/// Anything that can be sampled like a coefficient on the plane.
///
/// Implemented by [`CoefficientField`] and by derived quantities (products,
/// closures) built by the Schrödinger pipeline.
pub trait ScalarField: Sync {
    fn eval(&self, x1: f64, x2: f64) -> f64;

    /// Jump abscissae in `[0, 1)` along `x1`; quadrature splits there.
    fn jumps_x1(&self) -> Vec<f64> {
        Vec::new()
    }

    /// True when the field provably does not depend on `x1`.
    fn is_x1_constant(&self) -> bool {
        false
    }

    /// Native `x1` node count for tabulated data (trapezoid quadrature applies).
    fn native_x1_nodes(&self) -> Option<usize> {
        None
    }
}

/// A [`ScalarField`] backed by a closure.
pub struct FnField<F> {
    f: F,
    x1_constant: bool,
    jumps: Vec<f64>,
}

impl<F: Fn(f64, f64) -> f64 + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        FnField {
            f,
            x1_constant: false,
            jumps: Vec::new(),
        }
    }

    /// Declares the closure independent of `x1`.
    pub fn x1_constant(mut self, yes: bool) -> Self {
        self.x1_constant = yes;
        self
    }

    /// Declares jump or kink abscissae in `[0, 1)`.
    pub fn with_jumps(mut self, jumps: Vec<f64>) -> Self {
        self.jumps = jumps;
        self
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> ScalarField for FnField<F> {
    fn eval(&self, x1: f64, x2: f64) -> f64 {
        (self.f)(x1, x2)
    }

    fn jumps_x1(&self) -> Vec<f64> {
        self.jumps.clone()
    }

    fn is_x1_constant(&self) -> bool {
        self.x1_constant
    }
}

/// Closed-form scalar coefficient field.
///
/// Parameter conventions (`c1 = cos 2πx1`, `s2 = sin(2πx2/p + φ)`, `p = period_x2`):
///
/// | family | params | value |
/// |---|---|---|
/// | `constant` | `[c]` | `c` |
/// | `x1-cosine` | `[a, b]`, `[a, b, α, β]`, `[a, b, α, β, φ]` | `a + b·c1 + (α + β·c1)·s2` |
/// | `two-phase` | `[v0, v1]` or `[v0, v1, θ]` | `v0` on `[0, θ)`, `v1` on `[θ, 1)`; `θ = ½` by default |
/// | `separable-product` | `[a, b, c, d]` | `(a + b·c1)(c + d·cos(2πx2/p))` |
/// | `exp-gibbs` | `[s]` or `[s, κ]` | `exp(s·cos 2π(x1 − κ·sin(2πx2/p))) / √I0(2s)` |
/// | `tabulated-1d-profile` | node values on `x1 = i/n` | periodic linear interpolation |
///
/// The `exp-gibbs` family is normalized so that `∫₀¹ ω² dx1 = 1` for every `x2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub family: Family,
    pub params: Vec<f64>,
    #[serde(default = "default_period")]
    pub period_x2: f64,
    #[serde(default = "default_scale", skip_serializing_if = "is_unit")]
    pub scale: f64,
}

fn default_period() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

fn is_unit(s: &f64) -> bool {
    *s == 1.0
}

impl CoefficientField {
    pub fn new(family: Family, params: Vec<f64>, period_x2: f64) -> Result<Self> {
        let field = CoefficientField {
            family,
            params,
            period_x2,
            scale: 1.0,
        };
        field.check()?;
        Ok(field)
    }

    pub fn constant(c: f64) -> Self {
        CoefficientField::new(Family::Constant, vec![c], 1.0).expect("constant field")
    }

    /// `a + b·cos 2πx1`.
    pub fn x1_cosine(a: f64, b: f64) -> Self {
        CoefficientField::new(Family::X1Cosine, vec![a, b], 1.0).expect("cosine field")
    }

    pub fn two_phase(v0: f64, v1: f64) -> Self {
        CoefficientField::new(Family::TwoPhase, vec![v0, v1], 1.0).expect("two-phase field")
    }

    pub fn exp_gibbs(s: f64) -> Self {
        CoefficientField::new(Family::ExpGibbs, vec![s], 1.0).expect("exp-gibbs field")
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        CoefficientField::new(Family::Tabulated, values, 1.0)
    }

    pub fn with_period(mut self, period_x2: f64) -> Self {
        self.period_x2 = period_x2;
        self
    }

    /// The same field multiplied by `sigma`.
    pub fn scaled(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        out.scale *= sigma;
        out
    }

    /// Validates the parameter list against the family.
    pub fn check(&self) -> Result<()> {
        let n = self.params.len();
        let ok = match self.family {
            Family::Constant => n == 1,
            Family::X1Cosine => matches!(n, 2 | 4 | 5),
            Family::TwoPhase => n == 2 || (n == 3 && self.params[2] > 0.0 && self.params[2] < 1.0),
            Family::SeparableProduct => n == 4,
            Family::ExpGibbs => n == 1 || n == 2,
            Family::Tabulated => n >= 2,
        };
        if !ok {
            return Err(Error::config(format!(
                "family `{}` does not accept {} parameter(s) {:?}",
                self.family, n, self.params
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::config(format!(
                "non-finite parameter in `{}` field",
                self.family
            )));
        }
        if !(self.period_x2 > 0.0 && self.period_x2.is_finite()) {
            return Err(Error::config("period_x2 must be positive"));
        }
        if !self.scale.is_finite() {
            return Err(Error::config("field scale must be finite"));
        }
        Ok(())
    }

    fn phase_x2(&self, x2: f64) -> f64 {
        TWO_PI * x2 / self.period_x2
    }

    /// Value and derivatives at `(x1, x2)`.
    pub fn jet(&self, x1: f64, x2: f64) -> Jet {
        // reduce to the base cell so that shifts by a period are exact
        let x1 = x1.rem_euclid(1.0);
        let x2 = x2.rem_euclid(self.period_x2);
        let p = &self.params;
        let jet = match self.family {
            Family::Constant => Jet {
                value: p[0],
                ..Jet::default()
            },
            Family::X1Cosine => {
                let (a, b) = (p[0], p[1]);
                let (alpha, beta) = if p.len() >= 4 { (p[2], p[3]) } else { (0.0, 0.0) };
                let phi = if p.len() == 5 { p[4] } else { 0.0 };
                let (s1, c1) = (TWO_PI * x1).sin_cos();
                let w = TWO_PI / self.period_x2;
                let (s2, c2) = (self.phase_x2(x2) + phi).sin_cos();
                let amp = alpha + beta * c1;
                Jet {
                    value: a + b * c1 + amp * s2,
                    d1: -TWO_PI * s1 * (b + beta * s2),
                    d11: -TWO_PI * TWO_PI * c1 * (b + beta * s2),
                    d2: amp * w * c2,
                    d22: -amp * w * w * s2,
                }
            }
            Family::TwoPhase => {
                let (v0, v1) = (p[0], p[1]);
                let theta = if p.len() == 3 { p[2] } else { 0.5 };
                let t = x1;
                let value = if t == 0.0 || t == theta {
                    0.5 * (v0 + v1)
                } else if t < theta {
                    v0
                } else {
                    v1
                };
                Jet {
                    value,
                    ..Jet::default()
                }
            }
            Family::SeparableProduct => {
                let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
                let (s1, c1) = (TWO_PI * x1).sin_cos();
                let w = TWO_PI / self.period_x2;
                let (s2, c2) = self.phase_x2(x2).sin_cos();
                let u = a + b * c1;
                let v = c + d * c2;
                Jet {
                    value: u * v,
                    d1: -TWO_PI * b * s1 * v,
                    d11: -TWO_PI * TWO_PI * b * c1 * v,
                    d2: -u * d * w * s2,
                    d22: -u * d * w * w * c2,
                }
            }
            Family::ExpGibbs => {
                // ω(x1, x2) = f(x1 − θ(x2)) with f(y) = N·exp(s·cos 2πy).
                let s = p[0];
                let kappa = if p.len() == 2 { p[1] } else { 0.0 };
                let w = TWO_PI / self.period_x2;
                let (sp, cp) = self.phase_x2(x2).sin_cos();
                let theta = kappa * sp;
                let dtheta = kappa * w * cp;
                let ddtheta = -kappa * w * w * sp;
                let norm = bessel_i0(2.0 * s).sqrt().recip();
                let (sy, cy) = (TWO_PI * (x1 - theta)).sin_cos();
                let f = norm * (s * cy).exp();
                let f1 = -TWO_PI * s * sy * f;
                let f11 = TWO_PI * TWO_PI * s * (s * sy * sy - cy) * f;
                Jet {
                    value: f,
                    d1: f1,
                    d11: f11,
                    d2: -dtheta * f1,
                    d22: dtheta * dtheta * f11 - ddtheta * f1,
                }
            }
            Family::Tabulated => {
                let n = p.len();
                let t = x1 * n as f64;
                let i = (t.floor() as usize).min(n - 1);
                let frac = t - i as f64;
                let (y0, y1) = (p[i], p[(i + 1) % n]);
                Jet {
                    value: y0 + frac * (y1 - y0),
                    d1: (y1 - y0) * n as f64,
                    ..Jet::default()
                }
            }
        };
        jet.scaled(self.scale)
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.jet(x1, x2).value
    }

    /// True when the `x1` derivatives are classical everywhere (no jumps, no kinks).
    pub fn is_smooth_x1(&self) -> bool {
        !matches!(self.family, Family::TwoPhase | Family::Tabulated) || self.is_x1_constant_family()
    }

    fn is_x1_constant_family(&self) -> bool {
        let p = &self.params;
        match self.family {
            Family::Constant => true,
            Family::X1Cosine => p[1] == 0.0 && (p.len() < 4 || p[3] == 0.0),
            Family::TwoPhase => p[0] == p[1],
            Family::SeparableProduct => p[1] == 0.0,
            Family::ExpGibbs => p[0] == 0.0,
            Family::Tabulated => p.iter().all(|v| *v == p[0]),
        }
    }
}

impl ScalarField for CoefficientField {
    fn eval(&self, x1: f64, x2: f64) -> f64 {
        CoefficientField::eval(self, x1, x2)
    }

    fn jumps_x1(&self) -> Vec<f64> {
        match self.family {
            Family::TwoPhase if !self.is_x1_constant_family() => {
                vec![if self.params.len() == 3 { self.params[2] } else { 0.5 }]
            }
            _ => Vec::new(),
        }
    }

    fn is_x1_constant(&self) -> bool {
        self.is_x1_constant_family()
    }

    fn native_x1_nodes(&self) -> Option<usize> {
        match self.family {
            Family::Tabulated => Some(self.params.len()),
            _ => None,
        }
    }
}

/// Modified Bessel function `I0` by its power series.
pub fn bessel_i0(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// The coefficient triple `(g1, g2, Q)` of one problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub g1: CoefficientField,
    pub g2: CoefficientField,
    pub q: CoefficientField,
}

impl Coefficients {
    pub fn new(g1: CoefficientField, g2: CoefficientField, q: CoefficientField) -> Self {
        Coefficients { g1, g2, q }
    }

    /// All three fields multiplied by `sigma`.
    pub fn scaled(&self, sigma: f64) -> Self {
        Coefficients::new(self.g1.scaled(sigma), self.g2.scaled(sigma), self.q.scaled(sigma))
    }

    pub fn is_x1_independent(&self) -> bool {
        self.g1.is_x1_constant() && self.g2.is_x1_constant() && self.q.is_x1_constant()
    }

    pub fn validate(&self, density: usize) -> Result<HypothesisConstants> {
        validate_hypotheses(&self.g1, &self.g2, &self.q, density)
    }
}

/// Bounds of the coefficient hypotheses plus the derived spectral thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstants {
    /// lower bound of g1, g2
    pub c0: f64,
    /// upper bound of g1, g2
    pub c1: f64,
    /// Lipschitz bound of g1, g2 in x2
    pub c2: f64,
    /// lower bound of Q
    pub c3: f64,
    /// upper bound of Q
    pub c4: f64,
    /// Lipschitz bound of Q in x2
    pub c5: f64,
    /// isolation radius of the band bottom, `π²c0/4`
    pub delta: f64,
    /// quasimomentum window, `(π/2)·√(c0/c1)`
    pub t0: f64,
    /// lower bound of the first gap at k = 0, `4π²c0`
    pub d0: f64,
}

impl HypothesisConstants {
    pub fn from_bounds(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64, c5: f64) -> Self {
        HypothesisConstants {
            c0,
            c1,
            c2,
            c3,
            c4,
            c5,
            delta: PI * PI * c0 / 4.0,
            t0: 0.5 * PI * (c0 / c1).sqrt(),
            d0: 4.0 * PI * PI * c0,
        }
    }
}

/// Samples `g1`, `g2`, `q` on a tensor grid with `density` points per unit length
/// and returns their bounds, Lipschitz estimates and derived thresholds.
pub fn validate_hypotheses(
    g1: &CoefficientField,
    g2: &CoefficientField,
    q: &CoefficientField,
    density: usize,
) -> Result<HypothesisConstants> {
    if density < 64 {
        return Err(Error::config(format!(
            "sampling density {density} is below 64 points per unit"
        )));
    }
    let period = g1.period_x2;
    let n1 = density;
    let n2 = ((density as f64) * period).ceil().max(1.0) as usize;

    let mut g_lo = f64::INFINITY;
    let mut g_hi = f64::NEG_INFINITY;
    let mut g_lip = 0.0_f64;
    let mut q_lo = f64::INFINITY;
    let mut q_hi = f64::NEG_INFINITY;
    let mut q_lip = 0.0_f64;

    for j in 0..n2 {
        let x2 = j as f64 * period / n2 as f64;
        for i in 0..n1 {
            let x1 = i as f64 / n1 as f64;
            for (name, field) in [("g1", g1), ("g2", g2)] {
                let jet = field.jet(x1, x2);
                check_positive(name, jet.value, x1, x2)?;
                g_lo = g_lo.min(jet.value);
                g_hi = g_hi.max(jet.value);
                g_lip = g_lip.max(jet.d2.abs());
            }
            let jet = q.jet(x1, x2);
            check_positive("Q", jet.value, x1, x2)?;
            q_lo = q_lo.min(jet.value);
            q_hi = q_hi.max(jet.value);
            q_lip = q_lip.max(jet.d2.abs());
        }
    }
    Ok(HypothesisConstants::from_bounds(
        g_lo, g_hi, g_lip, q_lo, q_hi, q_lip,
    ))
}

fn check_positive(field: &str, value: f64, x1: f64, x2: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Hypothesis {
            field: field.to_string(),
            x1,
            x2,
            value,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        assert_eq!(CoefficientField::constant(2.5).eval(0.3, 0.7), 2.5);
        let f = CoefficientField::x1_cosine(2.0, 1.0);
        assert!(close(f.eval(0.0, 0.42), 3.0, 1e-15));
        assert!(close(f.eval(0.25, 0.42), 2.0, 1e-15));
    }

    #[test]
    fn unknown_tag_is_config_error() {
        assert!(matches!(Family::from_tag("bogus"), Err(Error::Config(_))));
        assert_eq!(Family::from_tag("exp-gibbs").unwrap(), Family::ExpGibbs);
    }

    #[test]
    fn bad_param_count_rejected() {
        assert!(CoefficientField::new(Family::SeparableProduct, vec![1.0], 1.0).is_err());
        assert!(CoefficientField::new(Family::TwoPhase, vec![1.0, 2.0, 1.5], 1.0).is_err());
    }

    #[test]
    fn two_phase_averages_on_jumps() {
        let f = CoefficientField::two_phase(1.0, 4.0);
        assert_eq!(f.eval(0.25, 0.0), 1.0);
        assert_eq!(f.eval(0.75, 0.0), 4.0);
        assert_eq!(f.eval(0.5, 0.0), 2.5);
        assert_eq!(f.eval(0.0, 0.0), 2.5);
        assert_eq!(f.eval(1.0, 0.0), 2.5);
    }

    #[test]
    fn exp_gibbs_is_normalized() {
        for s in [0.0, 0.3, 0.5, 1.2] {
            let w = CoefficientField::exp_gibbs(s);
            let n = 4096;
            let m: f64 = (0..n)
                .map(|i| w.eval(i as f64 / n as f64, 0.3).powi(2))
                .sum::<f64>()
                / n as f64;
            assert!(close(m, 1.0, 1e-12), "s = {s}: {m}");
        }
    }

    #[test]
    fn jets_match_central_differences() {
        let fields = [
            CoefficientField::new(Family::X1Cosine, vec![2.0, 0.7, 0.3, 0.2, 0.4], 1.3).unwrap(),
            CoefficientField::new(Family::SeparableProduct, vec![2.0, 0.5, 1.5, 0.4], 0.8)
                .unwrap(),
            CoefficientField::new(Family::ExpGibbs, vec![0.5, 0.15], 1.0).unwrap(),
        ];
        let h = 1e-4;
        for f in &fields {
            for &(x1, x2) in &[(0.13, 0.71), (0.62, 0.05), (0.91, 0.44)] {
                let j = f.jet(x1, x2);
                let d1 = (f.eval(x1 + h, x2) - f.eval(x1 - h, x2)) / (2.0 * h);
                let d11 = (f.eval(x1 + h, x2) - 2.0 * j.value + f.eval(x1 - h, x2)) / (h * h);
                let d2 = (f.eval(x1, x2 + h) - f.eval(x1, x2 - h)) / (2.0 * h);
                let d22 = (f.eval(x1, x2 + h) - 2.0 * j.value + f.eval(x1, x2 - h)) / (h * h);
                assert!(close(j.d1, d1, 1e-6 * (1.0 + d1.abs())), "{f:?} d1");
                assert!(close(j.d11, d11, 1e-4 * (1.0 + d11.abs())), "{f:?} d11");
                assert!(close(j.d2, d2, 1e-6 * (1.0 + d2.abs())), "{f:?} d2");
                assert!(close(j.d22, d22, 1e-4 * (1.0 + d22.abs())), "{f:?} d22");
            }
        }
    }

    #[test]
    fn hypothesis_constants_for_cosine() {
        let g = CoefficientField::x1_cosine(2.0, 1.0);
        let q = CoefficientField::constant(1.0);
        let c = validate_hypotheses(&g, &g, &q, 64).unwrap();
        assert!(close(c.c0, 1.0, 1e-15));
        assert!(close(c.c1, 3.0, 1e-15));
        assert_eq!(c.c2, 0.0);
        assert_eq!((c.c3, c.c4, c.c5), (1.0, 1.0, 0.0));
        assert!(close(c.delta, PI * PI / 4.0, 1e-15));
        assert!(close(c.t0, 0.5 * PI / 3f64.sqrt(), 1e-15));
        assert!(8.0 * c.delta < c.d0);
    }

    #[test]
    fn lipschitz_estimate_of_modulated_cosine() {
        // 2 + cos(2πx1)·sin(2πx2): analytic sup of |∂2| is 2π at x1 = 0, x2 = 0.
        let g = CoefficientField::new(Family::X1Cosine, vec![2.0, 0.0, 0.0, 1.0], 1.0).unwrap();
        let one = CoefficientField::constant(1.0);
        let c = validate_hypotheses(&g, &one, &one, 64).unwrap();
        assert!((c.c2 - TWO_PI).abs() <= 0.01 * TWO_PI);
        // dense finite-difference cross-check
        let n = 512;
        let h = 1e-5;
        let mut fd_max = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let (x1, x2) = (i as f64 / n as f64, j as f64 / n as f64);
                let d = (g.eval(x1, x2 + h) - g.eval(x1, x2 - h)) / (2.0 * h);
                fd_max = fd_max.max(d.abs());
            }
        }
        assert!((fd_max - c.c2).abs() <= 0.01 * TWO_PI);
    }

    #[test]
    fn sign_changing_field_is_rejected() {
        let g = CoefficientField::x1_cosine(0.0, 1.0);
        let one = CoefficientField::constant(1.0);
        match validate_hypotheses(&g, &one, &one, 64) {
            Err(Error::Hypothesis { field, value, .. }) => {
                assert_eq!(field, "g1");
                assert!(value <= 0.0);
            }
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }

    #[test]
    fn sparse_sampling_is_rejected() {
        let one = CoefficientField::constant(1.0);
        assert!(validate_hypotheses(&one, &one, &one, 32).is_err());
    }
}
