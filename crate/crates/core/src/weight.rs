use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{PrimInt, Unsigned};

/// Scalar type of edge weights.
///
/// Any unsigned primitive integer qualifies. Floating point weights are not
/// supported: the edge order must be a strict total order that is identical
/// on every run, and integer weights give that for free.
pub trait Weight: PrimInt + Unsigned + Hash + Debug + Default + Send + Sync + 'static {}

impl<T> Weight for T where T: PrimInt + Unsigned + Hash + Debug + Default + Send + Sync + 'static {}

/// Counts elementary steps of an operation. Used to check the linear and
/// quasi-linear cost bounds of select, join and insert.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub steps: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn tick(&mut self) {
        self.steps += 1;
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.steps += n;
    }
}
