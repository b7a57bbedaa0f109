//! Exact block interval frequency solvers and the key remapping used when
//! feeding them.

use rustc_hash::FxHashMap;

use crate::error::{ConfigError, QueryError};
use crate::num::Key;
use crate::stream::{ItemId, Params};

/// Exact counting over a stream of blocks.
///
/// Block recency 1 is the open block, 2 the most recently closed one, and so
/// on. `block_interval_query(x, i, j)` counts the `add(x)` calls made in the
/// blocks at recency `i+1 ..= j`.
pub trait BlockIntervalSolver<K: Key> {
    /// Solver sized for a reduction with parameters `p`.
    fn for_params(p: &Params) -> Result<Self, ConfigError>
    where
        Self: Sized;

    fn add(&mut self, x: K);

    fn end_block(&mut self);

    fn block_interval_query(&self, x: K, i: u64, j: u64) -> Result<u64, QueryError>;

    /// Largest admissible `j`.
    fn window_blocks(&self) -> u64;

    /// Appends every key whose count over `i+1 ..= j` may be nonzero.
    /// Duplicates are allowed.
    fn candidates(&self, i: u64, j: u64, out: &mut Vec<K>);

    fn live_entries(&self) -> usize;

    /// Closed blocks after which a key added in them is no longer stored.
    fn retention_blocks(&self) -> u64;
}

/// Counts closed blocks. Solvers derive their positions from it: ACC uses the
/// number of closed blocks within the current frame, HIT the absolute 1-based
/// index of the open block.
#[derive(Debug, Clone, Copy)]
pub struct BlockClock {
    frame: u64,
    closed: u64,
}

impl BlockClock {
    pub fn new(frame: u64) -> Self {
        assert!(frame > 0, "frame must hold a block");
        BlockClock { frame, closed: 0 }
    }

    pub fn tick(&mut self) {
        self.closed += 1;
    }

    /// Blocks closed since the start.
    pub fn closed(&self) -> u64 {
        self.closed
    }

    /// Absolute index of the open block, starting at 1.
    pub fn open_block(&self) -> u64 {
        self.closed + 1
    }

    /// Blocks closed in the current frame, `0..frame`.
    pub fn frame_closed(&self) -> u64 {
        self.closed % self.frame
    }
}

pub(crate) fn check_blocks(i: u64, j: u64, blocks: u64) -> Result<(), QueryError> {
    if i > j || j > blocks {
        return Err(QueryError::BadBlockIndex { i, j, blocks });
    }
    Ok(())
}

/// Dense `u32` aliases for item ids, recycled once no solver table can still
/// reference them.
#[derive(Debug, Clone, Default)]
pub struct ShortIds {
    ids: FxHashMap<ItemId, u32>,
    /// Item and block of last use, per short id.
    slots: Vec<(ItemId, u64)>,
    free: Vec<u32>,
}

const FREE: u64 = u64::MAX;

impl ShortIds {
    pub fn new() -> Self {
        Self::default()
    }

    /// Short id of `x`, marking it used in `block`.
    pub fn intern(&mut self, x: ItemId, block: u64) -> u32 {
        if let Some(&id) = self.ids.get(&x) {
            self.slots[id as usize].1 = block;
            return id;
        }
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = (x, block);
                id
            }
            None => {
                self.slots.push((x, block));
                u32::try_from(self.slots.len() - 1).expect("short id space exhausted")
            }
        };
        self.ids.insert(x, id);
        id
    }

    pub fn get(&self, x: &ItemId) -> Option<u32> {
        self.ids.get(x).copied()
    }

    pub fn item(&self, id: u32) -> ItemId {
        self.slots[id as usize].0
    }

    /// Releases ids last used before `block`.
    pub fn sweep(&mut self, block: u64) {
        for (id, slot) in self.slots.iter_mut().enumerate() {
            if slot.1 < block {
                self.ids.remove(&slot.0);
                slot.1 = FREE;
                self.free.push(id as u32);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}
