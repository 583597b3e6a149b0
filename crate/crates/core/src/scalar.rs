//! Real scalar abstraction: every numeric routine in this crate is generic
//! over [`Scalar`], implemented for `f32` and `f64`.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Draw one standard normal N(0, 1) sample.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw one uniform sample in [0, 1).
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Convert an `f64` constant, panicking only for non-finite inputs.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn uniform01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

/// Circularly symmetric complex Gaussian with total variance `variance`
/// (real and imaginary parts each carry half). Draw order is fixed:
/// real part first, then imaginary.
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    let s = (variance / T::of(2.0)).sqrt();
    let re = T::standard_normal(rng);
    let im = T::standard_normal(rng);
    Complex::new(s * re, s * im)
}
