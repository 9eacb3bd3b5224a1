//! Floating-point abstraction the numeric core is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar type for the math modules: `f32` or `f64`.
///
/// Aggregates the `num-traits` capabilities the library relies on. The
/// advertised accuracy contracts (digamma/trigamma to 1e-12 absolute,
/// quadrature tolerances, optimizer stopping rules) are stated for `f64`;
/// `f32` gets the same algorithms at correspondingly reduced precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant (coefficient tables, tolerances) into `Self`.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant must convert")
    }

    /// Lift a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| Self::c(n as f64))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
