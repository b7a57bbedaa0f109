//! Frequency of an item among the last `w` elements, within an absolute
//! error budget.
//!
//! The stream is cut into frames of `w` elements and each frame into blocks of
//! `b = budget/4` elements (the last block of a frame may be shorter). A Space
//! Saving summary with `ceil(w/b)` counters is flushed at every frame start.
//! Whenever an item's counter reaches a multiple of `b` the item is recorded
//! in the current block; `hist` counts the records of blocks that still
//! overlap the window.
//!
//! The minimal counter stays below `b` before every insertion, so a counter
//! that reaches `b` keeps its item until the flush. Hence, within one frame,
//! the arrivals of `x` in any range of blocks number at most `b` per record
//! plus `b - 1`. With `q` the unrecorded remainder of the current frame:
//!
//! * previous frame, blocks overlapping the window: undercount `< b` from the
//!   remainder, overcount `< 2b` from the record of the straddling block and
//!   from a record reached through a counter takeover;
//! * current frame: records plus the live counter residue cover `q`; a
//!   takeover overcounts by `< b`.
//!
//! Adding one block to the record total absorbs the undercount, so the
//! estimate lies in `[f, f + 4b - 1]`, below `budget`.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::error::QueryError;
use crate::num::{Count, Divisor, Key};
use crate::space_saving::{key_hash, SpaceSavingSummary};

#[derive(Debug, Clone, Copy)]
struct Block {
    /// Absolute position of the block's last element.
    end: u64,
    records: u32,
}

#[derive(Debug, Clone)]
pub struct FixedWindowEstimator<K, C> {
    w: u64,
    block: u64,
    multiple: Divisor,
    /// Offset of the next arrival within its frame.
    frame_pos: u64,
    /// Last position of the open block.
    open_end: u64,
    /// Position at which the oldest queued block leaves the window.
    expiry: u64,
    ss: SpaceSavingSummary<K, C>,
    blocks: VecDeque<Block>,
    /// Records of the queued blocks, oldest first.
    records: VecDeque<K>,
    hist: FxHashMap<K, C>,
    seen: u64,
}

impl<K: Key, C: Count> FixedWindowEstimator<K, C> {
    /// Estimator for window `w` with relative error `eps`.
    pub fn new(w: u64, eps: f64) -> Self {
        Self::with_error_budget(w, (w as f64 * eps).floor() as u64)
    }

    /// Estimator whose answers exceed the truth by less than `max(budget, 4)`.
    pub fn with_error_budget(w: u64, budget: u64) -> Self {
        assert!(w > 0, "window must be positive");
        let block = (budget / 4).clamp(1, w);
        let counters = w.div_ceil(block) as usize;
        FixedWindowEstimator {
            w,
            block,
            multiple: Divisor::new(block),
            frame_pos: 0,
            open_end: 0,
            expiry: u64::MAX,
            ss: SpaceSavingSummary::new(counters),
            blocks: VecDeque::new(),
            records: VecDeque::new(),
            hist: FxHashMap::default(),
            seen: 0,
        }
    }

    pub fn window(&self) -> u64 {
        self.w
    }

    pub fn block_size(&self) -> u64 {
        self.block
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Largest possible overestimate, `4b - 1`.
    pub fn max_error(&self) -> u64 {
        4 * self.block - 1
    }

    pub fn add(&mut self, x: K) {
        self.add_hashed(x, key_hash(&x));
    }

    pub(crate) fn add_hashed(&mut self, x: K, h: u64) {
        let offset = self.frame_pos;
        self.frame_pos = if offset + 1 == self.w { 0 } else { offset + 1 };
        self.seen += 1;
        let t = self.seen;
        if offset == 0 {
            self.ss.flush();
        }
        if t >= self.expiry {
            while self.blocks.front().is_some_and(|b| b.end + self.w <= t) {
                let old = self.blocks.pop_front().expect("nonempty");
                self.expire(old.records);
            }
            self.expiry = self.blocks.front().map_or(u64::MAX, |b| b.end + self.w);
        }
        if t > self.open_end {
            let end = t - 1 + (offset + self.block).min(self.w) - offset;
            if self.blocks.is_empty() {
                self.expiry = end + self.w;
            }
            self.blocks.push_back(Block { end, records: 0 });
            self.open_end = end;
        }
        let c = self.ss.add_hashed(x, h).0;
        if self.multiple.divides(c.as_u64()) {
            self.blocks.back_mut().expect("open block").records += 1;
            self.records.push_back(x);
            *self.hist.entry(x).or_insert_with(C::zero) += C::one();
        }
    }

    fn expire(&mut self, count: u32) {
        for x in self.records.drain(..count as usize) {
            let e = self.hist.get_mut(&x).expect("recorded item");
            *e -= C::one();
            if e.is_zero() {
                self.hist.remove(&x);
            }
        }
    }

    /// Estimate of `x`'s count among the last `w` elements.
    pub fn query(&self, x: &K) -> Result<u64, QueryError> {
        if self.seen < self.w {
            return Err(QueryError::WindowNotFull { seen: self.seen, window: self.w });
        }
        let recorded = self.hist.get(x).map_or(0, |c| c.as_u64());
        let residue = match self.ss.counter(x) {
            Some(c) => c.as_u64() % self.block,
            None => self.ss.min_value().as_u64(),
        };
        Ok(self.block * (recorded + 1) + residue)
    }

    /// Live counters plus histogram entries plus queued records.
    pub fn live_entries(&self) -> usize {
        self.ss.live_counters() + self.hist.len() + self.records.len()
    }

    /// Space Saving capacity.
    pub fn counters(&self) -> usize {
        self.ss.capacity()
    }

    /// Blocks currently queued.
    pub fn queued_blocks(&self) -> usize {
        self.blocks.len()
    }
}
