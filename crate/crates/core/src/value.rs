use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use nalgebra::SVector;

/// Range type of a bivariate function or u-function: a scalar or a fixed
/// size vector. All blends act componentwise through the vector-space
/// operations.
pub trait Value:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;

    /// Largest absolute component.
    fn sup_norm(&self) -> f64;
}

impl Value for f64 {
    fn zero() -> Self {
        0.0
    }

    fn sup_norm(&self) -> f64 {
        self.abs()
    }
}

impl<const D: usize> Value for SVector<f64, D> {
    fn zero() -> Self {
        SVector::zeros()
    }

    fn sup_norm(&self) -> f64 {
        self.amax()
    }
}
