//! Approximate cumulative count with `k` levels of prefix tables.
//!
//! A frame of `n` blocks is split into level-`(k-1)` segments of `d^(k-1)`
//! blocks, each split into `d` level-`(k-2)` segments, and so on down to
//! single blocks, where `d = round(n^(1/k))`. The last top-level segment
//! absorbs the remainder when `d^k != n`.
//!
//! Block `b` of the frame (1-based) closes a segment at level
//! `level(b) = min(v_d(b), k-1)`, with block `n` always at the top level. Its
//! table holds the counts from the start of the enclosing level-`(level+1)`
//! segment through `b`; top-level tables count from the frame start. So the
//! prefix of blocks `1..=b` is the sum of at most one table per nonzero base-`d`
//! digit of `b`.
//!
//! When slot `b` is overwritten in a new frame its old table moves to
//! `ghost[level(b)]`, which keeps the previous frame's prefixes readable for
//! queries that reach back past the frame start.

use std::cell::Cell;

use crate::block::{check_blocks, BlockClock, BlockIntervalSolver};
use crate::error::{ConfigError, QueryError};
use crate::num::{Count, Key};
use crate::stream::{acc_arity, Params};
use crate::table::LevelTable;

#[derive(Debug, Clone)]
pub struct AccSketch<K, C> {
    n: u64,
    k: usize,
    d: u64,
    /// `d^l` for `l < k`.
    pow: Vec<u64>,
    /// Tables of closed blocks, indexed `1..=n`.
    slots: Vec<LevelTable<K, C>>,
    inc: Vec<LevelTable<K, C>>,
    ghost: Vec<LevelTable<K, C>>,
    clock: BlockClock,
    reads: Cell<u64>,
    writes: u64,
}

impl<K: Key, C: Count> AccSketch<K, C> {
    /// Solver over frames of `n` blocks with `k` levels; answers queries over
    /// the last `n + 1` blocks.
    pub fn new(n: u64, k: u32) -> Result<Self, ConfigError> {
        let d = acc_arity(n, k)?;
        let k = k as usize;
        let mut pow = vec![1u64; k];
        for l in 1..k {
            pow[l] = pow[l - 1].saturating_mul(d);
        }
        Ok(AccSketch {
            n,
            k,
            d,
            pow,
            slots: vec![LevelTable::new(); n as usize + 1],
            inc: vec![LevelTable::new(); k],
            ghost: vec![LevelTable::new(); k],
            clock: BlockClock::new(n),
            reads: Cell::new(0),
            writes: 0,
        })
    }

    pub fn levels(&self) -> u32 {
        self.k as u32
    }

    pub fn arity(&self) -> u64 {
        self.d
    }

    pub fn frame_blocks(&self) -> u64 {
        self.n
    }

    /// Table reads since construction.
    pub fn reads(&self) -> u64 {
        self.reads.get()
    }

    /// Table writes since construction.
    pub fn writes(&self) -> u64 {
        self.writes
    }

    /// Level of the segment closed by frame block `b`.
    pub fn level(&self, b: u64) -> usize {
        if b == self.n {
            return self.k - 1;
        }
        let mut l = 0;
        while l + 1 < self.k && b.is_multiple_of(self.pow[l + 1]) {
            l += 1;
        }
        l
    }

    fn read(&self, t: &LevelTable<K, C>, x: &K) -> u64 {
        self.reads.set(self.reads.get() + 1);
        t.get(x)
    }

    /// Count over frame blocks `1..=b` of the current frame, or of the
    /// previous one when `prev` is set.
    fn prefix(&self, x: &K, b: u64, prev: bool) -> u64 {
        let mut sum = 0;
        let mut above = 0;
        for l in (0..self.k).rev() {
            let bl = b - b % self.pow[l];
            if bl != above {
                let t = if prev && bl <= self.clock.frame_closed() { &self.ghost[l] } else { &self.slots[bl as usize] };
                sum += self.read(t, x);
                above = bl;
            }
        }
        sum
    }

    /// Count of `x` in the last `w` blocks, `1 <= w <= n + 1`.
    pub fn win_query(&self, x: K, w: u64) -> Result<u64, QueryError> {
        if w == 0 || w > self.n + 1 {
            return Err(QueryError::BadBlockIndex { i: 0, j: w, blocks: self.n + 1 });
        }
        let open = self.clock.frame_closed() + 1;
        let cfreq = self.read(&self.inc[self.k - 1], &x);
        if w <= open {
            return Ok(cfreq - self.prefix(&x, open - w, false));
        }
        let start = self.n + open - w;
        let prev_total = self.read(&self.slots[self.n as usize], &x);
        Ok(cfreq + prev_total - self.prefix(&x, start, true))
    }
}

impl<K: Key, C: Count> BlockIntervalSolver<K> for AccSketch<K, C> {
    fn for_params(p: &Params) -> Result<Self, ConfigError> {
        Self::new(p.blocks, p.acc_levels.unwrap_or(1))
    }

    fn add(&mut self, x: K) {
        for t in &mut self.inc {
            t.increment(x);
        }
        self.writes += self.k as u64;
    }

    fn end_block(&mut self) {
        let b = self.clock.frame_closed() + 1;
        self.clock.tick();
        if b == self.n {
            self.slots[b as usize] = std::mem::take(&mut self.inc[self.k - 1]);
            self.inc.iter_mut().chain(self.ghost.iter_mut()).for_each(LevelTable::clear);
            return;
        }
        let l = self.level(b);
        for t in self.inc[..l].iter_mut().chain(self.ghost[..l].iter_mut()) {
            t.clear();
        }
        let snapshot = self.inc[l].clone();
        self.ghost[l] = std::mem::replace(&mut self.slots[b as usize], snapshot);
    }

    fn block_interval_query(&self, x: K, i: u64, j: u64) -> Result<u64, QueryError> {
        check_blocks(i, j, self.n + 1)?;
        if i == j {
            return Ok(0);
        }
        let hi = self.win_query(x, j)?;
        if i == 0 {
            return Ok(hi);
        }
        Ok(hi - self.win_query(x, i)?)
    }

    fn window_blocks(&self) -> u64 {
        self.n + 1
    }

    fn candidates(&self, i: u64, j: u64, out: &mut Vec<K>) {
        if i == j {
            return;
        }
        out.extend(self.inc[self.k - 1].keys());
        if j > self.clock.frame_closed() + 1 {
            out.extend(self.slots[self.n as usize].keys());
        }
    }

    fn live_entries(&self) -> usize {
        self.slots.iter().chain(&self.inc).chain(&self.ghost).map(LevelTable::len).sum()
    }

    fn retention_blocks(&self) -> u64 {
        2 * self.n + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Acc = AccSketch<u32, u32>;

    #[test]
    fn levels_of_blocks() {
        let a = Acc::new(4, 2).unwrap();
        assert_eq!((1..=4).map(|b| a.level(b)).collect::<Vec<_>>(), vec![0, 1, 0, 1]);
        let a = Acc::new(10, 2).unwrap();
        assert_eq!(a.arity(), 3);
        assert_eq!((1..=10).map(|b| a.level(b)).collect::<Vec<_>>(), vec![0, 0, 1, 0, 0, 1, 0, 0, 1, 1]);
        let a = Acc::new(8, 1).unwrap();
        assert!((1..=8).all(|b| a.level(b) == 0));
    }

    #[test]
    fn writes_per_add() {
        let mut a = Acc::new(16, 2).unwrap();
        a.add(3);
        assert_eq!(a.writes(), 2);
        a.add(3);
        assert_eq!(a.inc[0].get(&3), 2);
    }

    #[test]
    fn single_level_prefix() {
        let mut a = Acc::new(8, 1).unwrap();
        a.add(7);
        a.end_block();
        assert_eq!(a.block_interval_query(7, 0, 1), Ok(0));
        assert_eq!(a.block_interval_query(7, 0, 2), Ok(1));
        assert_eq!(a.block_interval_query(7, 1, 2), Ok(1));
        assert_eq!(a.block_interval_query(7, 2, 2), Ok(0));
        a.add(7);
        assert_eq!(a.block_interval_query(7, 0, 1), Ok(1));
    }

    #[test]
    fn frame_boundary_and_ghosts() {
        // Item 1 in every block of frame one, item 2 in block 3 only.
        let mut a = Acc::new(4, 2).unwrap();
        for b in 1..=4 {
            a.add(1);
            if b == 3 {
                a.add(2);
            }
            a.end_block();
        }
        assert_eq!(a.win_query(1, 5), Ok(4));
        assert_eq!(a.win_query(2, 5), Ok(1));
        // Two blocks into frame two; slot 2 (level 1) now sits in a ghost.
        a.end_block();
        a.end_block();
        assert!(!a.ghost[1].is_empty());
        assert_eq!(a.win_query(1, 5), Ok(2));
        assert_eq!(a.win_query(2, 5), Ok(1));
        assert_eq!(a.win_query(2, 4), Ok(0));
        assert_eq!(a.win_query(1, 4), Ok(1));
        assert_eq!(a.win_query(2, 3), Ok(0));
        assert_eq!(a.win_query(1, 3), Ok(0));
    }

    #[test]
    fn bad_index() {
        let a = Acc::new(8, 2).unwrap();
        assert!(matches!(a.block_interval_query(1, 0, 10), Err(QueryError::BadBlockIndex { .. })));
        assert!(matches!(a.block_interval_query(1, 3, 2), Err(QueryError::BadBlockIndex { .. })));
    }
}
