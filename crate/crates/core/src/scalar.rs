//! Scalar abstraction: every numerical routine in this crate is generic over
//! a floating-point type implementing [`Real`]. Concrete aliases for the
//! common `f64` instantiation live at the crate root.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + core::fmt::Debug
        + core::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` literal into the working scalar type.
#[inline]
pub fn flt<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable in the scalar type")
}

/// Convert the working scalar back to `f64` for reports and diagnostics.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar is representable as f64")
}
