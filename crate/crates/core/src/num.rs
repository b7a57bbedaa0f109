//! Counter type used by the sketches.

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{FromPrimitive, NumAssign, PrimInt, ToPrimitive, Unsigned};

/// Unsigned integer type that can hold a frequency count.
///
/// The sketches never subtract below zero, so any unsigned primitive works.
/// `u32` is enough for windows below 2^32 elements.
pub trait Count:
    PrimInt + Unsigned + NumAssign + FromPrimitive + ToPrimitive + Hash + Debug + Default + Send + Sync + 'static
{
    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("count overflow")
    }

    fn as_u64(self) -> u64 {
        self.to_u64().expect("count does not fit in u64")
    }
}

impl<T> Count for T where
    T: PrimInt + Unsigned + NumAssign + FromPrimitive + ToPrimitive + Hash + Debug + Default + Send + Sync + 'static
{
}

/// Key type stored in the per-block tables.
pub trait Key: Copy + Eq + Hash + Debug + Send + Sync + 'static {}

impl<T: Copy + Eq + Hash + Debug + Send + Sync + 'static> Key for T {}

/// Tests divisibility by a fixed `d` with one multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Divisor {
    d: u64,
    m: u64,
}

impl Divisor {
    pub fn new(d: u64) -> Self {
        assert!(d > 0, "zero divisor");
        Divisor { d, m: (u64::MAX / d).wrapping_add(1) }
    }

    pub fn get(&self) -> u64 {
        self.d
    }

    #[inline]
    pub fn divides(&self, n: u64) -> bool {
        if n <= u32::MAX as u64 {
            n.wrapping_mul(self.m) <= self.m.wrapping_sub(1)
        } else {
            n.is_multiple_of(self.d)
        }
    }
}
