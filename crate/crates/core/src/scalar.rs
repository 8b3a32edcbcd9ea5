use std::fmt;
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented automatically for `f32` and `f64`; the CLI and the reference
/// tolerances assume `f64`, but every kernel compiles and runs at `f32` too.
pub trait Scalar:
    Float + FromPrimitive + AddAssign + Sum<Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from a small unsigned index.
    fn from_index(n: usize) -> Self {
        Self::from_usize(n).expect("index representable as scalar")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + Sum<T>
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Neumaier-compensated running sum.
///
/// Keeps the absolute error of a long prefix sum at O(eps * |total|) instead
/// of growing with the number of addends; the log-factorial tables feed
/// 1e-12-level comparisons, where the naive random walk is not good enough.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub(crate) fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}
