//! Scalar abstraction: all core math is generic over the floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the solvers run on (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal (tolerances, bounds).
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant must convert into the scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
