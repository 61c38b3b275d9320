//! Scalar abstraction. Every numerical routine in the crate is generic over
//! [`Real`], which is implemented for `f32` and `f64`.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable as the base field of all operators.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + std::fmt::Display + 'static
{
    /// Machine epsilon of the type, widened to `f64`.
    const EPS: f64;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Absolute tolerance `x`, raised to a thousand ulps when the type
    /// cannot resolve `x`.
    fn tol(x: f64) -> Self {
        Self::lit(x.max(1e3 * Self::EPS))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            const EPS: f64 = <$t>::EPSILON as f64;
        }
    };
}

impl_real!(f32);
impl_real!(f64);

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// The imaginary unit.
#[inline]
pub fn imag<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// `e^{iφ}`.
#[inline]
pub fn cis<T: Real>(phi: T) -> C<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// Converts a complex value between scalar types.
pub fn convert_c<A: Real, B: Real>(z: C<A>) -> C<B> {
    Complex::new(B::lit(z.re.as_f64()), B::lit(z.im.as_f64()))
}

/// `|z|` for complex values over any [`Real`]; `Complex::norm` needs
/// `num_traits::Float`, which the scalar bound does not carry.
pub trait Modulus<T: Real> {
    fn modulus(&self) -> T;
}

impl<T: Real> Modulus<T> for C<T> {
    #[inline]
    fn modulus(&self) -> T {
        self.norm_sqr().sqrt()
    }
}
