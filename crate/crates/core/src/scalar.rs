//! Scalar abstraction shared by the imaging and radiomics code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point pixel/feature scalar: `f32` or `f64`.
pub trait Scalar:
    'static + Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync
{
    /// Lossless-enough conversion from `f64` literals and intermediate results.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
