//! Scalar abstraction shared by the SO(3) kernel and the element code.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Minimal real-number interface needed by the rotation kernel.
///
/// Implemented for every `num_traits::Float` (so `f32` and `f64`) and for
/// [`crate::jet::Jet`], which carries first and second derivatives.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    /// Value part as `f64`; used for branch selection.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn abs(self) -> Self;
    /// Machine epsilon of the underlying storage type.
    fn epsilon() -> f64;
}

impl<T> Real for T
where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Send
        + Sync
        + 'static,
{
    #[inline]
    fn from_f64(v: f64) -> Self {
        <T as num_traits::FromPrimitive>::from_f64(v).expect("f64 is representable")
    }
    #[inline]
    fn value(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).expect("finite scalar")
    }
    #[inline]
    fn sqrt(self) -> Self {
        num_traits::Float::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        num_traits::Float::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        num_traits::Float::cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        num_traits::Float::atan2(self, x)
    }
    #[inline]
    fn abs(self) -> Self {
        num_traits::Float::abs(self)
    }
    #[inline]
    fn epsilon() -> f64 {
        num_traits::ToPrimitive::to_f64(&<T as num_traits::Float>::epsilon()).unwrap()
    }
}
