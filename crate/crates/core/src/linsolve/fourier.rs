use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::discretize::{StencilCoefficients, TorusGrid};
use crate::error::{Error, Result};

use super::cg::Preconditioner;

/// Direct solver for five-point operators whose coefficients depend on `x2`
/// only, such as the effective operator `A⁰ + Q⁰`.
///
/// Diagonalizes in `x1` by FFT and solves one cyclic tridiagonal system in
/// `x2` per Fourier mode (Sherman–Morrison on a Thomas factorization).
pub struct EffectiveSolver {
    n1: usize,
    n2: usize,
    /// coupling between rows `j` and `j+1` (negative)
    off: Vec<f64>,
    modes: Vec<ModeFactor>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

struct ModeFactor {
    cp: Vec<f64>,
    inv: Vec<f64>,
    z: Vec<f64>,
    gamma: f64,
    denom: f64,
}

impl EffectiveSolver {
    /// Fails unless every row of `coeffs` is constant in `x1`.
    pub fn new(grid: &TorusGrid, coeffs: &StencilCoefficients) -> Result<Self> {
        if grid.is_line() {
            return Err(Error::config("fast effective solver needs a two-dimensional grid"));
        }
        let (n1, n2) = (grid.n1, grid.n2);
        let ih1 = 1.0 / (grid.h1() * grid.h1());
        let ih2 = 1.0 / (grid.h2() * grid.h2());
        let mut a = Vec::with_capacity(n2);
        let mut b = Vec::with_capacity(n2);
        let mut q = Vec::with_capacity(n2);
        for j in 0..n2 {
            let row = j * n1..(j + 1) * n1;
            let first = |v: &[f64]| v[row.start];
            for v in [&coeffs.x1_links, &coeffs.x2_links, &coeffs.diag] {
                let r = &v[row.clone()];
                if r.iter().any(|&x| x != r[0]) {
                    return Err(Error::config("fast effective solver needs x1-independent coefficients"));
                }
            }
            a.push(first(&coeffs.x1_links) * ih1);
            b.push(first(&coeffs.x2_links) * ih2);
            q.push(first(&coeffs.diag));
        }
        let off: Vec<f64> = b.iter().map(|&bj| -bj).collect();
        let mut modes = Vec::with_capacity(n1);
        for n in 0..n1 {
            let s = (std::f64::consts::PI * n as f64 / n1 as f64).sin();
            let sigma = 4.0 * s * s;
            let diag: Vec<f64> = (0..n2)
                .map(|j| a[j] * sigma + b[j] + b[(j + n2 - 1) % n2] + q[j])
                .collect();
            modes.push(ModeFactor::new(&diag, &off)?);
        }
        let mut planner = FftPlanner::new();
        Ok(EffectiveSolver {
            n1,
            n2,
            off,
            forward: planner.plan_fft_forward(n1),
            inverse: planner.plan_fft_inverse(n1),
            modes,
        })
    }

    /// Solves in place on a complex grid vector.
    pub fn solve_complex(&self, buf: &mut [Complex64]) {
        let (n1, n2) = (self.n1, self.n2);
        self.forward.process(buf);
        let mut col = vec![Complex64::new(0.0, 0.0); n2];
        for (n, mode) in self.modes.iter().enumerate() {
            for j in 0..n2 {
                col[j] = buf[j * n1 + n];
            }
            mode.solve(&self.off, &mut col);
            for j in 0..n2 {
                buf[j * n1 + n] = col[j];
            }
        }
        self.inverse.process(buf);
        let s = 1.0 / n1 as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.solve_complex(&mut buf);
        buf.into_iter().map(|v| v.re).collect()
    }
}

impl Preconditioner<f64> for EffectiveSolver {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(&self.solve(r));
    }
}

impl ModeFactor {
    fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        let gamma = -diag[0];
        let corner = off[n - 1];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= corner * corner / gamma;
        let mut cp = vec![0.0; n];
        let mut inv = vec![0.0; n];
        for j in 0..n {
            let sub = if j == 0 { 0.0 } else { off[j - 1] };
            let piv = d[j] - if j == 0 { 0.0 } else { sub * cp[j - 1] };
            if !(piv.is_finite() && piv.abs() > 0.0) {
                return Err(Error::Numerical("singular effective operator".into()));
            }
            inv[j] = 1.0 / piv;
            cp[j] = if j + 1 < n { off[j] * inv[j] } else { 0.0 };
        }
        let mut f = ModeFactor {
            cp,
            inv,
            z: vec![0.0; n],
            gamma,
            denom: 0.0,
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = corner;
        f.thomas(off, &mut u);
        let denom = 1.0 + u[0] + corner * u[n - 1] / gamma;
        if !(denom.abs() > 0.0) {
            return Err(Error::Numerical("singular effective operator".into()));
        }
        f.z = u;
        f.denom = denom;
        Ok(f)
    }

    fn thomas<T>(&self, off: &[f64], x: &mut [T])
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = x.len();
        x[0] = x[0] * self.inv[0];
        for j in 1..n {
            x[j] = (x[j] - x[j - 1] * off[j - 1]) * self.inv[j];
        }
        for j in (0..n - 1).rev() {
            x[j] = x[j] - x[j + 1] * self.cp[j];
        }
    }

    fn solve(&self, off: &[f64], x: &mut [Complex64]) {
        let n = x.len();
        self.thomas(off, x);
        let corner = off[n - 1];
        let fact = (x[0] + x[n - 1] * (corner / self.gamma)) / self.denom;
        for (xj, zj) in x.iter_mut().zip(&self.z) {
            *xj -= fact * *zj;
        }
    }
}
