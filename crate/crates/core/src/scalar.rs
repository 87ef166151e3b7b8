//! Scalar abstraction for the rational-function algebra.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

use crate::tolerances::Tolerances;

/// Real floating-point type underlying the complex coefficients.
///
/// Root finding always runs its eigenvalue stage in `f64`; everything else
/// (arithmetic, reduction, partial fractions, Newton polish) runs in `Self`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerances appropriate for the precision of this type.
    fn default_tolerances() -> Tolerances;
}

impl Real for f64 {
    fn default_tolerances() -> Tolerances {
        Tolerances::DOUBLE
    }
}

impl Real for f32 {
    fn default_tolerances() -> Tolerances {
        Tolerances::SINGLE
    }
}

/// Lossy conversion from an `f64` literal.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub(crate) fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

#[inline]
pub(crate) fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    c(z.re, z.im)
}

/// `n!` as a real number.
pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * lit::<T>(k as f64))
}

/// Binomial coefficient `C(n, k)`.
pub(crate) fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, j| {
        acc * lit::<T>((n - j) as f64) / lit::<T>((j + 1) as f64)
    })
}
