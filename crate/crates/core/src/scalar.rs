//! Scalar abstraction shared by the closed-form parts of the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the analytic layer is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion used when building error messages and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `Complex::new(x, 0)`.
#[inline]
pub fn re<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Purely imaginary `i·y`.
#[inline]
pub fn im<T: Scalar>(y: T) -> Complex<T> {
    Complex::new(T::zero(), y)
}
