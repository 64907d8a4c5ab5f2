use crate::discretize::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::{axpy, Scalar};

use super::options::{PreconditionerKind, SolveOptions};

/// Approximate inverse applied inside preconditioned CG.
pub trait Preconditioner<T>: Sync {
    /// `z ← P⁻¹ r`
    fn apply(&self, r: &[T], z: &mut [T]);
}

pub struct Identity;

impl<T: Scalar> Preconditioner<T> for Identity {
    fn apply(&self, r: &[T], z: &mut [T]) {
        z.copy_from_slice(r);
    }
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new<T: Scalar>(op: &SparseOperator<T>) -> Result<Self> {
        let inv_diag = op
            .diagonal()
            .into_iter()
            .map(|d| {
                let d = d.re();
                if d > 0.0 {
                    Ok(1.0 / d)
                } else {
                    Err(Error::Numerical(format!("Jacobi preconditioner needs a positive diagonal, found {d}")))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Jacobi { inv_diag })
    }
}

impl<T: Scalar> Preconditioner<T> for Jacobi {
    fn apply(&self, r: &[T], z: &mut [T]) {
        for ((zi, ri), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri.scale(*d);
        }
    }
}

/// Result of one linear solve.
#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// True relative residual `‖rhs − op·x‖ / ‖rhs‖`, recomputed after convergence.
    pub rel_residual: f64,
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc += *a * b.conj();
    }
    acc
}

fn norm2<T: Scalar>(u: &[T]) -> f64 {
    u.iter().map(|a| a.abs2()).sum::<f64>().sqrt()
}

/// Preconditioned conjugate gradients for a Hermitian positive definite operator.
///
/// Convergence is declared on the recurrence residual and then confirmed on the
/// true residual; if they disagree the iteration restarts from the current
/// iterate until the iteration budget runs out.
pub fn pcg<T: Scalar>(
    op: &SparseOperator<T>,
    rhs: &[T],
    precond: &dyn Preconditioner<T>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome<T>> {
    let n = op.dim();
    assert_eq!(rhs.len(), n, "right-hand side length mismatch");
    let bnorm = norm2(rhs);
    let mut x = vec![T::zero(); n];
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            rel_residual: 0.0,
        });
    }
    let target = rel_tol * bnorm;
    let mut r = rhs.to_vec();
    let mut z = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    let mut iterations = 0;
    let mut rnorm = bnorm;

    loop {
        precond.apply(&r, &mut z);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z).re();
        while rnorm > target && iterations < max_iter {
            op.apply(&p, &mut q);
            let pq = dot(&p, &q).re();
            if !(pq > 0.0) {
                return Err(Error::Numerical(format!(
                    "operator is not positive definite (pᴴAp = {pq:e})"
                )));
            }
            let alpha = rz / pq;
            axpy(T::from_real(alpha), &p, &mut x);
            axpy(T::from_real(-alpha), &q, &mut r);
            rnorm = norm2(&r);
            iterations += 1;
            if rnorm <= target {
                break;
            }
            precond.apply(&r, &mut z);
            let rz_next = dot(&r, &z).re();
            let beta = rz_next / rz;
            rz = rz_next;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = *zi + pi.scale(beta);
            }
        }
        // post-hoc check against the true residual
        op.apply(&x, &mut q);
        for ((ri, bi), ai) in r.iter_mut().zip(rhs).zip(&q) {
            *ri = *bi - *ai;
        }
        rnorm = norm2(&r);
        if rnorm <= target {
            return Ok(CgOutcome {
                solution: x,
                iterations,
                rel_residual: rnorm / bnorm,
            });
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                what: "conjugate gradients".into(),
                iterations,
                achieved: rnorm / bnorm,
            });
        }
    }
}

/// Solves `op · u = rhs` to `opts.rel_tol` with the preconditioner named in
/// `opts` (`Effective` falls back to Jacobi for operators without a fast solver).
pub fn cg_solve<T: Scalar>(op: &SparseOperator<T>, rhs: &[T], opts: &SolveOptions) -> Result<Vec<T>> {
    opts.check()?;
    let cap = opts.iteration_cap(op.dim());
    let out = match opts.preconditioner {
        PreconditionerKind::None => pcg(op, rhs, &Identity, opts.rel_tol, cap)?,
        PreconditionerKind::Jacobi | PreconditionerKind::Effective => {
            pcg(op, rhs, &Jacobi::new(op)?, opts.rel_tol, cap)?
        }
    };
    Ok(out.solution)
}
