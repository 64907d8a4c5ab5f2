use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Field of matrix entries: `f64` for real operators, `Complex64` for
/// Bloch-phased fibers.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn abs2(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn random<R: Rng>(rng: &mut R) -> Self;
    fn to_c64(self) -> Complex64;
    /// Real scalars keep the real part.
    fn from_c64(z: Complex64) -> Self;

    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z.re
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
}

/// Weighted inner product `w·Σ uᵢ·conj(vᵢ)`.
pub fn inner<T: Scalar>(u: &[T], v: &[T], weight: f64) -> T {
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc += *a * b.conj();
    }
    acc.scale(weight)
}

/// Weighted norm `√(w·Σ|uᵢ|²)`.
pub fn norm<T: Scalar>(u: &[T], weight: f64) -> f64 {
    (weight * u.iter().map(|a| a.abs2()).sum::<f64>()).sqrt()
}

/// `y ← y + a·x`
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}
