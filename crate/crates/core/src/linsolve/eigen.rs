use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discretize::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::{inner, norm, Scalar};

use super::cg::{pcg, Jacobi};
use super::options::SolveOptions;

/// Residual bound `‖op·v − λ v‖` accepted by [`smallest_eigenpair`].
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

const MAX_INVERSE_STEPS: usize = 2000;

/// Lowest eigenvalue and a unit eigenvector (weighted norm) of a Hermitian
/// operator, by shifted inverse iteration with CG inner solves.
///
/// The shift sits just below the Gershgorin lower bound, so every inner
/// system is positive definite.
pub fn smallest_eigenpair<T: Scalar>(op: &SparseOperator<T>, opts: &SolveOptions) -> Result<(f64, Vec<T>)> {
    opts.check()?;
    let n = op.dim();
    let w = op.weight();
    let (lo, hi) = op.gershgorin();
    let tau = 1e-4 * (hi - lo).max(1e-300) + f64::MIN_POSITIVE;
    let shift = lo.min(0.0) - tau;
    let mut shifted = op.clone();
    shifted.add_diagonal(&vec![-shift; n]);
    let precond = Jacobi::new(&shifted)?;
    let cap = opts.iteration_cap(n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<T> = (0..n).map(|_| T::random(&mut rng)).collect();
    scale_to_unit(&mut v, w);
    let mut last = f64::INFINITY;
    for _ in 0..MAX_INVERSE_STEPS {
        let (lambda, res) = residual(op, &v);
        last = res;
        if res <= EIGEN_RESIDUAL_TOL {
            return Ok((lambda, v));
        }
        v = pcg(&shifted, &v, &precond, opts.rel_tol, cap)?.solution;
        scale_to_unit(&mut v, w);
    }
    Err(Error::NonConvergence {
        what: "inverse iteration".into(),
        iterations: MAX_INVERSE_STEPS,
        achieved: last,
    })
}

/// Rayleigh quotient and eigen-residual of a unit vector.
pub fn residual<T: Scalar>(op: &SparseOperator<T>, v: &[T]) -> (f64, f64) {
    let w = op.weight();
    let av = op.mul_vec(v);
    let lambda = inner(&av, v, w).re() / inner(v, v, w).re();
    let r: Vec<T> = av.iter().zip(v).map(|(a, b)| *a - b.scale(lambda)).collect();
    (lambda, norm(&r, w))
}

fn scale_to_unit<T: Scalar>(v: &mut [T], weight: f64) {
    let s = 1.0 / norm(v, weight);
    v.iter_mut().for_each(|x| *x = x.scale(s));
}

/// Full spectrum of a Hermitian operator by dense factorization; the
/// reference oracle for small instances.
#[derive(Clone, Debug)]
pub struct DenseSpectrum<T> {
    /// ascending
    pub values: Vec<f64>,
    /// unit vectors in the operator's weighted norm, matching `values`
    pub vectors: Vec<Vec<T>>,
}

pub fn dense_eigen<T: Scalar>(op: &SparseOperator<T>) -> DenseSpectrum<T> {
    let n = op.dim();
    let dense = op.to_dense();
    let unit = 1.0 / op.weight().sqrt();
    let mut pairs: Vec<(f64, Vec<T>)> = if T::IS_COMPLEX {
        let m = DMatrix::<Complex64>::from_fn(n, n, |r, c| dense[r * n + c].to_c64());
        let eig = m.symmetric_eigen();
        (0..n)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                (eig.eigenvalues[k], col.iter().map(|z| T::from_c64(z * unit)).collect())
            })
            .collect()
    } else {
        let m = DMatrix::<f64>::from_fn(n, n, |r, c| dense[r * n + c].to_c64().re);
        let eig = m.symmetric_eigen();
        (0..n)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                (
                    eig.eigenvalues[k],
                    col.iter().map(|&x| T::from_real(x * unit)).collect(),
                )
            })
            .collect()
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, vectors) = pairs.into_iter().unzip();
    DenseSpectrum { values, vectors }
}

/// Dense eigenvalues only, ascending.
pub fn dense_eigenvalues<T: Scalar>(op: &SparseOperator<T>) -> Vec<f64> {
    let n = op.dim();
    let dense = op.to_dense();
    let mut vals: Vec<f64> = if T::IS_COMPLEX {
        DMatrix::<Complex64>::from_fn(n, n, |r, c| dense[r * n + c].to_c64())
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::<f64>::from_fn(n, n, |r, c| dense[r * n + c].to_c64().re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Spectral norm of a dense Hermitian matrix given row-major.
pub fn dense_hermitian_norm<T: Scalar>(n: usize, data: &[T]) -> f64 {
    let vals: Vec<f64> = if T::IS_COMPLEX {
        DMatrix::<Complex64>::from_fn(n, n, |r, c| data[r * n + c].to_c64())
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::<f64>::from_fn(n, n, |r, c| data[r * n + c].to_c64().re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    vals.iter().fold(0.0, |m, v| m.max(v.abs()))
}
