//! Floating point scalar abstraction.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Gathers the traits the geometry kernel needs from a coordinate type.
///
/// Implemented for `f32` and `f64`. Each type carries its own default
/// snapping tolerance, because a relative band of `1e-9` is below the
/// resolution of single precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default relative snapping tolerance (multiplied by the link diameter).
    const DEFAULT_EPS_REL: f64;
    /// Perturbation angle used to push a direction off an arrangement vertex.
    const EPS_DIR: f64;
    /// Threshold below which a vector counts as zero when normalizing.
    const NORMAL_EPS: f64;

    /// Lossless-enough conversion from `f64` literals.
    #[inline]
    fn lit(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f64 {
    const DEFAULT_EPS_REL: f64 = 1e-9;
    const EPS_DIR: f64 = 1e-6;
    const NORMAL_EPS: f64 = 1e-12;
}

impl Scalar for f32 {
    const DEFAULT_EPS_REL: f64 = 1e-5;
    const EPS_DIR: f64 = 1e-3;
    const NORMAL_EPS: f64 = 1e-6;
}
