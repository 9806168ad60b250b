//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display + std::fmt::LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}

#[inline]
pub fn cplx<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Euclidean norm of a real vector.
pub fn norm<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

/// Euclidean norm of a complex vector.
pub fn cnorm<T: Scalar>(x: &[Complex<T>]) -> T {
    x.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
}

/// The pairing `<a, b> = sum_j a_j * conj(b_j)`.
pub fn pairing<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x * y.conj())
}

pub fn to_complex<T: Scalar>(x: &[T]) -> Vec<Complex<T>> {
    x.iter().map(|&v| Complex::new(v, T::zero())).collect()
}

pub fn real_part<T: Scalar>(x: &[Complex<T>]) -> Vec<T> {
    x.iter().map(|v| v.re).collect()
}

pub fn imag_part<T: Scalar>(x: &[Complex<T>]) -> Vec<T> {
    x.iter().map(|v| v.im).collect()
}

pub fn conj_vec<T: Scalar>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    x.iter().map(|v| v.conj()).collect()
}

pub fn scale_vec<T: Scalar>(x: &[Complex<T>], s: Complex<T>) -> Vec<Complex<T>> {
    x.iter().map(|v| v * s).collect()
}
