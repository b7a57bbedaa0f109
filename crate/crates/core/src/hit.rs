//! Hierarchical interval tree over the last closed blocks.
//!
//! Closed blocks are numbered from 1. Block `b` owns one table per level
//! `0..=min(ctz(b), cap)`; the level-`l` table counts the blocks
//! `b - 2^l + 1 ..= b`. It is the entrywise sum of `b`'s level-`(l-1)` table
//! and that of block `b - 2^(l-1)`.
//!
//! A query walks back from the newest closed block in range, each step taking
//! the highest level allowed both by the current block's alignment and by the
//! blocks still to cover. This is the canonical dyadic cover of the range, at
//! most `2*log2(len)` tables.
//!
//! Tables whose span starts before the oldest retained block can never be
//! selected by the walk and are dropped as the window slides.

use std::cell::Cell;
use std::collections::VecDeque;

use crate::block::{check_blocks, BlockClock, BlockIntervalSolver};
use crate::error::{ConfigError, QueryError};
use crate::num::{Count, Key};
use crate::stream::Params;
use crate::table::LevelTable;

type Levels<K, C> = Vec<Option<LevelTable<K, C>>>;

#[derive(Debug, Clone)]
pub struct HitSketch<K, C> {
    window: u64,
    /// Closed blocks retained, `window - 1`.
    keep: u64,
    cap: u32,
    clock: BlockClock,
    tables: VecDeque<Levels<K, C>>,
    /// Index of the block at the front of `tables`.
    first: u64,
    inc: LevelTable<K, C>,
    lookups: Cell<u64>,
}

fn floor_log2(v: u64) -> u32 {
    63 - v.leading_zeros()
}

impl<K: Key, C: Count> HitSketch<K, C> {
    /// Solver answering queries over the last `window` blocks, the open one
    /// included.
    pub fn new(window: u64) -> Result<Self, ConfigError> {
        if window < 2 {
            return Err(ConfigError::BlockTooSmall { window, epsilon: 1.0 });
        }
        let keep = window - 1;
        Ok(HitSketch {
            window,
            keep,
            cap: floor_log2(keep),
            clock: BlockClock::new(window),
            tables: VecDeque::with_capacity(keep as usize + 1),
            first: 1,
            inc: LevelTable::new(),
            lookups: Cell::new(0),
        })
    }

    /// Highest table level kept.
    pub fn max_level(&self) -> u32 {
        self.cap
    }

    /// Table lookups since construction.
    pub fn lookups(&self) -> u64 {
        self.lookups.get()
    }

    /// Table of block `b` at level `l`, if still held.
    pub fn table(&self, b: u64, l: u32) -> Option<&LevelTable<K, C>> {
        let idx = b.checked_sub(self.first)?;
        self.tables.get(idx as usize)?.get(l as usize)?.as_ref()
    }

    /// Calls `visit` on the tables covering recency `i+1 ..= j`, in walk order.
    fn walk<'a>(&'a self, i: u64, j: u64, mut visit: impl FnMut(&'a LevelTable<K, C>)) {
        if i == j {
            return;
        }
        if i == 0 {
            visit(&self.inc);
        }
        let lo = i.max(1);
        if j <= lo {
            return;
        }
        let Some(mut b) = self.clock.open_block().checked_sub(lo) else {
            return;
        };
        let mut d = (j - lo).min(b);
        while d > 0 {
            let l = b.trailing_zeros().min(floor_log2(d)).min(self.cap);
            let t = self.table(b, l).expect("walk stays inside the retained window");
            visit(t);
            b -= 1 << l;
            d -= 1 << l;
        }
    }

    /// Count over recency `i+1 ..= j` and the number of tables read.
    pub fn query_with_lookups(&self, x: K, i: u64, j: u64) -> Result<(u64, u32), QueryError> {
        check_blocks(i, j, self.window)?;
        let mut sum = 0;
        let mut n = 0;
        self.walk(i, j, |t| {
            sum += t.get(&x);
            n += 1;
        });
        self.lookups.set(self.lookups.get() + n as u64);
        Ok((sum, n))
    }

    fn drop_oldest(&mut self) {
        let m = self.first;
        self.tables.pop_front();
        self.first += 1;
        for l in 1..=self.cap {
            let e = m + (1 << l) - 1;
            if e.trailing_zeros() >= l {
                if let Some(slot) = self.tables.get_mut((e - self.first) as usize).and_then(|lv| lv.get_mut(l as usize))
                {
                    *slot = None;
                }
            }
        }
    }
}

impl<K: Key, C: Count> BlockIntervalSolver<K> for HitSketch<K, C> {
    fn for_params(p: &Params) -> Result<Self, ConfigError> {
        Self::new(p.solver_blocks())
    }

    fn add(&mut self, x: K) {
        self.inc.increment(x);
    }

    fn end_block(&mut self) {
        let b = self.clock.open_block();
        self.clock.tick();
        let top = b.trailing_zeros().min(self.cap) as usize;
        let mut levels: Levels<K, C> = Vec::with_capacity(top + 1);
        levels.push(Some(std::mem::take(&mut self.inc)));
        for l in 1..=top {
            let half = 1u64 << (l - 1);
            let own = levels[l - 1].as_ref().expect("just built");
            let other = self.table(b - half, l as u32 - 1).expect("sibling span is retained");
            levels.push(Some(LevelTable::merged(own, other)));
        }
        self.tables.push_back(levels);
        while self.tables.len() as u64 > self.keep {
            self.drop_oldest();
        }
    }

    fn block_interval_query(&self, x: K, i: u64, j: u64) -> Result<u64, QueryError> {
        self.query_with_lookups(x, i, j).map(|(v, _)| v)
    }

    fn window_blocks(&self) -> u64 {
        self.window
    }

    fn candidates(&self, i: u64, j: u64, out: &mut Vec<K>) {
        if j <= self.window {
            self.walk(i, j, |t| out.extend(t.keys()));
        }
    }

    fn live_entries(&self) -> usize {
        self.inc.len() + self.tables.iter().flatten().flatten().map(LevelTable::len).sum::<usize>()
    }

    fn retention_blocks(&self) -> u64 {
        self.window
    }
}
