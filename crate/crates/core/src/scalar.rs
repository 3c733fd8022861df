use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar every degree, weight and labelling is expressed in.
///
/// Implemented for `f32` and `f64`. The default comparison tolerances scale
/// with the precision of the type.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Equality tolerance on degrees in `[0, 1]`.
    fn deg_eps() -> Self;

    /// Equality tolerance on weights (sums of weighted degrees).
    fn weight_eps() -> Self;

    /// Converts an `f64` literal, panicking only if the value is not representable.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn deg_eps() -> Self {
        1e-9
    }

    fn weight_eps() -> Self {
        1e-7
    }
}

impl Scalar for f32 {
    fn deg_eps() -> Self {
        1e-5
    }

    fn weight_eps() -> Self {
        1e-4
    }
}

/// Pair of tolerances used by every checker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance<T> {
    pub deg: T,
    pub weight: T,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Tolerance {
            deg: T::deg_eps(),
            weight: T::weight_eps(),
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(deg: T, weight: T) -> Self {
        Tolerance { deg, weight }
    }

    /// Same weight tolerance, degree tolerance replaced.
    pub fn with_deg(self, deg: T) -> Self {
        Tolerance { deg, ..self }
    }

    pub(crate) fn deg_eq(&self, a: T, b: T) -> bool {
        (a - b).abs() <= self.deg
    }

    pub(crate) fn deg_gt(&self, a: T, b: T) -> bool {
        a - b > self.deg
    }

    pub(crate) fn weight_gt(&self, a: T, b: T) -> bool {
        a - b > self.weight
    }
}
