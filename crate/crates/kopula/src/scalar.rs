use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used throughout the library.
///
/// Implemented for `f32` and `f64`. The two tolerances are the structural
/// validation slack and the identity (roundtrip) slack for the type.
pub trait Scalar:
    Float + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    fn validation_tol() -> Self;
    fn roundtrip_tol() -> Self;

    /// Converts a literal; panics only if the value is not representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f64 {
    fn validation_tol() -> Self {
        1e-9
    }
    fn roundtrip_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn validation_tol() -> Self {
        1e-5
    }
    fn roundtrip_tol() -> Self {
        1e-5
    }
}
