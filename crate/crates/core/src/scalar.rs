//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer into this scalar.
    #[inline]
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer representable")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// `exp(i * theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sqr<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm<T: Real>(v: &[C<T>]) -> T {
    norm_sqr(v).sqrt()
}

/// Inner product `<a, b>`, conjugate-linear in `a`.
pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}
