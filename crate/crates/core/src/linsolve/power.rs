use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::{axpy, inner, norm, Scalar};

use super::options::SolveOptions;

/// Operator-norm estimate from power iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub last_rel_change: f64,
    pub converged: bool,
}

/// Estimates `max |λ|` of a self-adjoint map by power iteration.
///
/// Each step reports the larger of `‖D v‖` for the current unit vector `v`
/// and the largest Ritz value modulus on `span{v_prev, v}`; both are lower
/// bounds for the spectral norm. `weight` is the node weight of the inner
/// product the map is self-adjoint in. Errors from `apply` are propagated;
/// non-convergence is reported in the estimate.
pub fn power_iteration<T: Scalar>(
    apply: &mut dyn FnMut(&[T], &mut [T]) -> Result<()>,
    dim: usize,
    weight: f64,
    opts: &SolveOptions,
) -> Result<NormEstimate> {
    opts.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<T> = (0..dim).map(|_| T::random(&mut rng)).collect();
    normalize(&mut v, weight);
    let mut w = vec![T::zero(); dim];
    // previous unit vector and ‖D v_prev‖, so that D v_prev = mu_prev · v
    let mut prev: Option<(Vec<T>, f64)> = None;
    let mut value = 0.0;
    let mut last_rel_change = f64::INFINITY;
    for it in 1..=opts.power_max_iter {
        apply(&v, &mut w)?;
        let mu = norm(&w, weight);
        if mu == 0.0 {
            return Ok(NormEstimate {
                value,
                iterations: it,
                last_rel_change: 0.0,
                converged: true,
            });
        }
        let mut next = mu;
        if let Some((u, mu_prev)) = &prev {
            next = next.max(ritz_bound(u, *mu_prev, &v, &w, weight));
        }
        last_rel_change = (next - value).abs() / next;
        value = value.max(next);
        if last_rel_change < opts.power_tol {
            return Ok(NormEstimate {
                value,
                iterations: it,
                last_rel_change,
                converged: true,
            });
        }
        let s = 1.0 / mu;
        w.iter_mut().for_each(|x| *x = x.scale(s));
        let old = std::mem::replace(&mut v, std::mem::take(&mut w));
        w = vec![T::zero(); dim];
        prev = Some((old, mu));
    }
    Ok(NormEstimate {
        value,
        iterations: opts.power_max_iter,
        last_rel_change,
        converged: false,
    })
}

/// Largest Ritz value modulus of `D` on `span{u, v}` where `D u = mu·v` and
/// `D v = w`, with `u`, `v` unit vectors.
fn ritz_bound<T: Scalar>(u: &[T], mu: f64, v: &[T], w: &[T], weight: f64) -> f64 {
    let c = inner(v, u, weight);
    let mut x: Vec<T> = v.to_vec();
    axpy(-c, u, &mut x);
    let xn = norm(&x, weight);
    if xn < 1e-10 {
        return 0.0;
    }
    x.iter_mut().for_each(|e| *e = e.scale(1.0 / xn));
    // D e2 = (w − c·mu·v) / xn
    let mut de2: Vec<T> = w.to_vec();
    axpy(-(c.scale(mu)), v, &mut de2);
    de2.iter_mut().for_each(|e| *e = e.scale(1.0 / xn));
    let a = mu * inner(v, u, weight).re();
    let d = inner(&de2, &x, weight).re();
    let b = inner(&de2, u, weight);
    let half = 0.5 * (a - d);
    let r = (half * half + b.abs2()).sqrt();
    let mid = 0.5 * (a + d);
    (mid + r).abs().max((mid - r).abs())
}

fn normalize<T: Scalar>(v: &mut [T], weight: f64) {
    let n = norm(v, weight);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x = x.scale(1.0 / n));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble_divgrad, TorusGrid};
    use crate::linsolve::cg_solve;

    fn diag_map(d: Vec<f64>) -> impl FnMut(&[f64], &mut [f64]) -> Result<()> {
        move |x, y| {
            for i in 0..x.len() {
                y[i] = d[i] * x[i];
            }
            Ok(())
        }
    }

    #[test]
    fn dominant_modulus() {
        let mut f = diag_map(vec![3.0, -1.0, 2.0]);
        let est = power_iteration(&mut f, 3, 1.0, &SolveOptions::default()).unwrap();
        assert!(est.converged);
        assert!(est.value <= 3.0 + 1e-12);
        assert!((est.value - 3.0).abs() < 3.0 * 1e-4, "{est:?}");
        // the 1e-6 agreement needs a tighter stopping tolerance than the default
        let tight = SolveOptions {
            power_tol: 1e-9,
            ..SolveOptions::default()
        };
        let est = power_iteration(&mut f, 3, 1.0, &tight).unwrap();
        assert!((est.value - 3.0).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn identity_any_dim() {
        for dim in [1, 5, 40] {
            let mut f = diag_map(vec![1.0; dim]);
            let est = power_iteration(&mut f, dim, 0.3, &SolveOptions::default()).unwrap();
            assert!((est.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_map_converges_to_zero() {
        let mut f = diag_map(vec![0.0; 4]);
        let est = power_iteration(&mut f, 4, 1.0, &SolveOptions::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn laplacian_resolvent_norm_is_one() {
        let grid = TorusGrid::line(8).unwrap();
        let op = assemble_divgrad(&grid, &|_, _| 1.0, &|_, _| 0.0, &|_, _| 1.0).unwrap();
        let opts = SolveOptions::default().with_tol(1e-13);
        let mut f = |x: &[f64], y: &mut [f64]| {
            y.copy_from_slice(&cg_solve(&op, x, &opts)?);
            Ok(())
        };
        let est = power_iteration(&mut f, 8, grid.weight(), &opts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn cap_reports_non_convergence() {
        let mut f = diag_map(vec![1.0, -1.0]);
        let opts = SolveOptions {
            power_max_iter: 3,
            ..SolveOptions::default()
        };
        // |λ| ties: ‖Dv‖ = 1 from the first step, so this converges immediately
        let est = power_iteration(&mut f, 2, 1.0, &opts).unwrap();
        assert!(est.converged);
        let mut g = diag_map((0..10).map(|i| 1.0 - 0.05 * i as f64).collect());
        let est = power_iteration(&mut g, 10, 1.0, &SolveOptions { power_tol: 1e-30, ..opts }).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 3);
    }
}
