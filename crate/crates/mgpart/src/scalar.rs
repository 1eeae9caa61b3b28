//! Floating-point abstraction for the closed-form formulas.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar accepted by the formula layer.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 fits every Scalar")
    }

    /// Lossy conversion from an integer count.
    fn of_count(n: u64) -> Self {
        Self::from_u64(n).expect("u64 fits every Scalar")
    }

    /// π².
    fn pi2() -> Self {
        Self::PI() * Self::PI()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// The scalar used by the graph, spectral and optimisation layers.
pub type Real = f64;
