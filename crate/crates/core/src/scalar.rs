//! Scalar abstractions: the real field the library is generic over and the
//! matrix-element trait shared by real and complex entries.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, ToPrimitive, Zero};

/// Real scalar type for all numerics in this crate (`f32` or `f64`).
///
/// Everything downstream (functions, measures, partitions, operators) is
/// generic over this trait; `f64` aliases live at the crate root.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Element<R = Self>
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant must be representable in the scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Entry type of a dense matrix: a real scalar or a complex number over one.
pub trait Element:
    Copy
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + NumAssign
    + Send
    + Sync
    + 'static
{
    type R: Real;

    fn conj(self) -> Self;
    fn modulus_sq(self) -> Self::R;
    fn from_real(r: Self::R) -> Self;
    fn scale(self, r: Self::R) -> Self;

    fn modulus(self) -> Self::R {
        self.modulus_sq().sqrt()
    }
}

macro_rules! impl_real_element {
    ($($t:ty),*) => {$(
        impl Element for $t {
            type R = $t;

            fn conj(self) -> Self {
                self
            }

            fn modulus_sq(self) -> Self::R {
                self * self
            }

            fn from_real(r: Self::R) -> Self {
                r
            }

            fn scale(self, r: Self::R) -> Self {
                self * r
            }
        }
    )*};
}

impl_real_element!(f32, f64);

impl<F: Real> Element for Complex<F> {
    type R = F;

    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn modulus_sq(self) -> Self::R {
        self.re * self.re + self.im * self.im
    }

    fn from_real(r: Self::R) -> Self {
        Complex::new(r, F::zero())
    }

    fn scale(self, r: Self::R) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_of_round_trips_constants() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.25), 0.25f32);
    }

    #[test]
    fn complex_element_ops() {
        let z = Complex::new(3.0f64, -4.0);
        assert_eq!(z.modulus_sq(), 25.0);
        assert_eq!(Element::modulus(z), 5.0);
        assert_eq!(Element::conj(z), Complex::new(3.0, 4.0));
        assert_eq!(<Complex<f64> as Element>::from_real(2.0), Complex::new(2.0, 0.0));
        assert_eq!(z.scale(2.0), Complex::new(6.0, -8.0));
    }
}
