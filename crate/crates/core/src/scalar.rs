//! Floating-point scalar abstraction.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar backing every amplitude: `f32` or `f64`.
///
/// The tolerances are per-type; the `f64` values are the ones the crate's
/// documentation quotes.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Allowed deviation of Σ|amp|² from 1 on inputs.
    const NORM_TOL: f64;
    /// Probabilities below this count as impossible branches.
    const ZERO_PROB: f64;

    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;

    fn norm_tol() -> Self {
        Self::of(Self::NORM_TOL)
    }

    fn zero_prob() -> Self {
        Self::of(Self::ZERO_PROB)
    }
}

impl Scalar for f64 {
    const NORM_TOL: f64 = 1e-10;
    const ZERO_PROB: f64 = 1e-14;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const NORM_TOL: f64 = 1e-5;
    const ZERO_PROB: f64 = 1e-10;

    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
