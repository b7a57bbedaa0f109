//! Interval frequencies from an exact block solver.
//!
//! Each frame of `W` elements is cut into `n` blocks of `s` elements (the last
//! one shorter when `s` does not divide `W`). A Space Saving summary with `n`
//! counters is flushed at every frame start; whenever an item's counter hits a
//! multiple of `s` the item is recorded in the current block of the solver.
//!
//! A query is answered from the blocks that contain its endpoints and
//! everything between: `s * (g + 2)`, where `g` is the solver's exact count.
//! Within a frame, a range of blocks with `e` records holds fewer than
//! `s * (e + 1)` arrivals, and at least `s * (e - 1) + 1` once the straddling
//! end blocks are discounted. Two frame pieces therefore bound the estimate to
//! `[f + 2, f + 6s - 2]`.
//!
//! With deamortization the records of a block are handed to the solver during
//! the next block, a few per arrival. A query can then miss one record of the
//! block being handed over, so the correction grows to three blocks and `s`
//! shrinks to `W*eps/7`.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::block::{BlockIntervalSolver, ShortIds};
use crate::error::{ConfigError, ModeError, QueryError};
use crate::space_saving::SpaceSavingSummary;
use crate::stream::{validate_config, BlockMode, IntervalFrequency, IntervalQuery, ItemId, Params, SketchConfig};

/// Result of a heavy hitter query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeavyHitters {
    /// The threshold is at or below the smallest possible estimate, so every
    /// item qualifies, including ones never seen.
    Universe { min_estimate: u64 },
    /// Items whose estimate reaches the threshold, with their estimates.
    Listed(Vec<(ItemId, u64)>),
}

impl HeavyHitters {
    pub fn contains(&self, x: &ItemId) -> bool {
        match self {
            HeavyHitters::Universe { .. } => true,
            HeavyHitters::Listed(v) => v.iter().any(|(y, _)| y == x),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Handoff {
    /// Records of the open block.
    pending: Vec<u32>,
    pending_set: FxHashSet<u32>,
    /// Records of the previous block not yet given to the solver.
    queue: VecDeque<u32>,
    rate: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionSketch<S> {
    cfg: SketchConfig,
    p: Params,
    ss: SpaceSavingSummary<ItemId, u64>,
    solver: S,
    ids: ShortIds,
    seen: u64,
    /// Absolute index of the open block, from 0.
    open_block: u64,
    handoff: Option<Handoff>,
    records: u64,
}

impl<S: BlockIntervalSolver<u32>> ReductionSketch<S> {
    pub fn new(cfg: &SketchConfig) -> Result<Self, ConfigError> {
        let p = validate_config(cfg)?;
        Ok(ReductionSketch {
            cfg: *cfg,
            p,
            ss: SpaceSavingSummary::new(p.counters() as usize),
            solver: S::for_params(&p)?,
            ids: ShortIds::new(),
            seen: 0,
            open_block: 0,
            handoff: cfg.deamortize.then(Handoff::default),
            records: 0,
        })
    }

    pub fn params(&self) -> &Params {
        &self.p
    }

    pub fn solver(&self) -> &S {
        &self.solver
    }

    /// Records handed to the solver so far, queued ones included.
    pub fn records(&self) -> u64 {
        self.records
    }

    /// Switches between standard and reduced block sizes; only before the
    /// first update.
    pub fn set_block_size_mode(&mut self, mode: BlockMode) -> Result<(), ModeError> {
        if self.seen > 0 {
            return Err(ModeError::ModeChangeAfterStart);
        }
        *self = Self::new(&self.cfg.with_block_mode(mode))?;
        Ok(())
    }

    fn block_of(&self, pos: u64) -> u64 {
        let (w, s) = (self.p.window, self.p.block_size);
        (pos - 1) / w * self.p.blocks + (pos - 1) % w / s
    }

    fn block_start(&self, b: u64) -> u64 {
        b / self.p.blocks * self.p.window + b % self.p.blocks * self.p.block_size + 1
    }

    fn block_len(&self, b: u64) -> u64 {
        if b % self.p.blocks == self.p.blocks - 1 {
            self.p.window - (self.p.blocks - 1) * self.p.block_size
        } else {
            self.p.block_size
        }
    }

    /// Block recency range `(lo, hi]` used for the element interval `(i, j]`.
    fn block_range(&self, i: u64, j: u64) -> (u64, u64) {
        let t = self.seen;
        let cur = self.block_of(t + 1);
        let (newest, oldest) = (t - i, t - j + 1);
        let (bn, bo) = (self.block_of(newest), self.block_of(oldest));
        let (mut lo, mut hi) = (cur - bn, cur - bo + 1);
        if self.p.block_mode == BlockMode::Reduced {
            if bn == bo {
                if 2 * (j - i) < self.block_len(bn) {
                    return (0, 0);
                }
            } else {
                if 2 * (newest - self.block_start(bn) + 1) < self.block_len(bn) {
                    lo += 1;
                }
                let old_end = self.block_start(bo) + self.block_len(bo) - 1;
                if 2 * (old_end - oldest + 1) < self.block_len(bo) {
                    hi -= 1;
                }
            }
        }
        (lo, hi)
    }

    fn block_count(&self, x: &ItemId, lo: u64, hi: u64) -> u64 {
        if lo >= hi {
            return 0;
        }
        let Some(id) = self.ids.get(x) else {
            return 0;
        };
        match &self.handoff {
            None => self.solver.block_interval_query(id, lo, hi).expect("range inside solver window"),
            Some(h) => {
                let open = (lo == 0 && h.pending_set.contains(&id)) as u64;
                let closed = if hi >= 2 {
                    self.solver.block_interval_query(id, lo.max(1) - 1, hi - 1).expect("range inside solver window")
                } else {
                    0
                };
                open + closed
            }
        }
    }

    fn record(&mut self, x: ItemId) {
        let id = self.ids.intern(x, self.open_block);
        self.records += 1;
        match &mut self.handoff {
            None => self.solver.add(id),
            Some(h) => {
                h.pending.push(id);
                h.pending_set.insert(id);
            }
        }
    }

    fn hand_over(&mut self, limit: usize) {
        if let Some(h) = &mut self.handoff {
            for _ in 0..limit {
                let Some(id) = h.queue.pop_front() else { break };
                self.solver.add(id);
            }
        }
    }

    fn close_block(&mut self) {
        self.open_block += 1;
        if self.handoff.is_some() {
            self.hand_over(usize::MAX);
            self.solver.end_block();
            let next_len = self.block_len(self.open_block) as usize;
            let h = self.handoff.as_mut().expect("handoff enabled");
            h.queue.extend(h.pending.drain(..));
            h.pending_set.clear();
            h.rate = h.queue.len().div_ceil(next_len);
        } else {
            self.solver.end_block();
        }
        if self.open_block.is_multiple_of(self.p.blocks) {
            let keep = self.solver.retention_blocks() + 2;
            self.ids.sweep(self.open_block.saturating_sub(keep));
        }
    }

    /// Items whose estimate over `(i, j]` is at least `theta * (j - i)`.
    ///
    /// Every item with true count at least the threshold is returned, and none
    /// with true count below `threshold - W*eps`.
    pub fn heavy_hitters(&self, theta: f64, i: u64, j: u64) -> Result<HeavyHitters, QueryError> {
        IntervalQuery::new(0, i, j).check(self.p.window, self.seen)?;
        let threshold = theta * (j - i) as f64;
        let min_estimate = self.p.correction_blocks() * self.p.block_size;
        if min_estimate as f64 >= threshold {
            return Ok(HeavyHitters::Universe { min_estimate });
        }
        let (lo, hi) = self.block_range(i, j);
        let mut ids = Vec::new();
        if lo < hi {
            match &self.handoff {
                None => self.solver.candidates(lo, hi, &mut ids),
                Some(h) => {
                    if lo == 0 {
                        ids.extend(h.pending.iter().copied());
                    }
                    if hi >= 2 {
                        self.solver.candidates(lo.max(1) - 1, hi - 1, &mut ids);
                    }
                    ids.extend(h.queue.iter().copied());
                }
            }
        }
        let mut items: Vec<ItemId> = ids.into_iter().map(|id| self.ids.item(id)).collect();
        items.extend(self.ss.iter().map(|(x, _)| x));
        items.sort_unstable();
        items.dedup();
        let mut out = Vec::new();
        for x in items {
            let est = self.interval_query(IntervalQuery { item: x, i, j })?;
            if est as f64 >= threshold {
                out.push((x, est));
            }
        }
        Ok(HeavyHitters::Listed(out))
    }
}

impl<S: BlockIntervalSolver<u32>> IntervalFrequency for ReductionSketch<S> {
    fn add(&mut self, x: ItemId) {
        let offset = self.seen % self.p.window;
        self.seen += 1;
        if let Some(rate) = self.handoff.as_ref().map(|h| h.rate) {
            self.hand_over(rate);
        }
        if self.ss.add(x).is_multiple_of(self.p.block_size) {
            self.record(x);
        }
        let next = offset + 1;
        if next == self.p.window || next.is_multiple_of(self.p.block_size) {
            self.close_block();
        }
        if next == self.p.window {
            self.ss.flush();
        }
    }

    fn interval_query(&self, q: IntervalQuery) -> Result<u64, QueryError> {
        q.check(self.p.window, self.seen)?;
        let s = self.p.block_size;
        let c = self.p.correction_blocks();
        if q.i == q.j {
            return Ok(s * c);
        }
        let (lo, hi) = self.block_range(q.i, q.j);
        Ok(s * (self.block_count(&q.item, lo, hi) + c))
    }

    fn window(&self) -> u64 {
        self.p.window
    }

    fn seen(&self) -> u64 {
        self.seen
    }

    fn live_entries(&self) -> usize {
        let handoff = self.handoff.as_ref().map_or(0, |h| h.pending.len() + h.queue.len());
        self.ss.live_counters() + self.solver.live_entries() + self.ids.len() + handoff
    }
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;

    use super::*;
    use crate::stream::ExactOracle;

    /// Brute-force solver that also logs every call.
    #[derive(Debug, Clone, Default)]
    struct Recorder {
        window: u64,
        blocks: VecDeque<Vec<u32>>,
        ends: u64,
    }

    impl BlockIntervalSolver<u32> for Recorder {
        fn for_params(p: &Params) -> Result<Self, ConfigError> {
            Ok(Recorder { window: p.solver_blocks(), blocks: VecDeque::from([Vec::new()]), ends: 0 })
        }
        fn add(&mut self, x: u32) {
            let open = self.blocks.back_mut().unwrap();
            assert!(!open.contains(&x), "second record of {x} in one block");
            open.push(x);
        }
        fn end_block(&mut self) {
            self.ends += 1;
            self.blocks.push_back(Vec::new());
        }
        fn block_interval_query(&self, x: u32, i: u64, j: u64) -> Result<u64, QueryError> {
            assert!(i <= j && j <= self.window);
            let n = self.blocks.len() as u64;
            Ok((i..j.min(n))
                .map(|r| self.blocks[(n - 1 - r) as usize].iter().filter(|&&y| y == x).count() as u64)
                .sum())
        }
        fn window_blocks(&self) -> u64 {
            self.window
        }
        fn candidates(&self, _: u64, _: u64, out: &mut Vec<u32>) {
            out.extend(self.blocks.iter().flatten());
        }
        fn live_entries(&self) -> usize {
            self.blocks.iter().map(Vec::len).sum()
        }
        fn retention_blocks(&self) -> u64 {
            u64::MAX / 4
        }
    }

    type Red = ReductionSketch<Recorder>;

    #[test]
    fn unit_blocks_record_everything() {
        let mut r = Red::new(&SketchConfig::new(6, 1.0)).unwrap();
        for (t, x) in [1, 2, 1, 3, 3, 1, 2].into_iter().enumerate() {
            r.add(ItemId(x));
            assert_eq!(r.records(), t as u64 + 1);
            assert_eq!(r.solver().ends, t as u64 + 1);
        }
    }

    #[test]
    fn one_record_per_two_arrivals() {
        let mut r = Red::new(&SketchConfig::new(12, 1.0)).unwrap();
        assert_eq!(r.params().block_size, 2);
        r.add(ItemId(1));
        assert_eq!(r.records(), 0);
        r.add(ItemId(1));
        assert_eq!(r.records(), 1);
    }

    #[test]
    fn flush_at_frame_end() {
        let mut r = Red::new(&SketchConfig::new(12, 1.0)).unwrap();
        (0..12).for_each(|v| r.add(ItemId(v % 3)));
        assert_eq!(r.ss.inserted(), 0);
        assert!((0..3).all(|v| r.ss.query(&ItemId(v)) == 0));
    }

    #[test]
    fn never_seen_item() {
        let mut r = Red::new(&SketchConfig::new(60, 0.5)).unwrap();
        (0..100).for_each(|v| r.add(ItemId(v % 4)));
        assert_eq!(r.interval_query(IntervalQuery::new(99, 0, 60)), Ok(2 * 5));
        assert_eq!(r.interval_query(IntervalQuery::new(1, 7, 7)), Ok(10));
    }

    #[test]
    fn homogeneous_full_window() {
        let w = 120;
        let mut r = Red::new(&SketchConfig::new(w, 0.5)).unwrap();
        for _ in 0..3 * w + 7 {
            r.add(ItemId(5));
            if r.seen() >= w {
                let e = r.interval_query(IntervalQuery::new(5, 0, w)).unwrap();
                assert!(w <= e && e <= w + w / 2, "{e}");
                assert_eq!(e % r.params().block_size, 0);
            }
        }
    }

    #[test]
    fn mode_change_only_before_start() {
        let cfg = SketchConfig::new(1000, 0.1);
        let mut r = Red::new(&cfg).unwrap();
        r.set_block_size_mode(BlockMode::Reduced).unwrap();
        assert_eq!((r.params().block_size, r.params().blocks), (20, 50));
        r.add(ItemId(1));
        assert_eq!(r.set_block_size_mode(BlockMode::Standard), Err(ModeError::ModeChangeAfterStart));
        let mut r = Red::new(&cfg.with_block_mode(BlockMode::Reduced)).unwrap();
        (0..1500).for_each(|v| r.add(ItemId(v % 7)));
        assert!(r.interval_query(IntervalQuery::new(1000, 0, 1000)).unwrap() <= 40);
    }

    fn sweep(cfg: SketchConfig, stream: impl Iterator<Item = u64>) {
        let mut r = Red::new(&cfg).unwrap();
        let mut o = ExactOracle::new(cfg.window);
        let bound = r.params().error_bound();
        let w = cfg.window;
        for (t, x) in stream.enumerate() {
            r.add(ItemId(x));
            o.add(ItemId(x));
            if r.seen() < w || t % 7 != 0 {
                continue;
            }
            for i in (0..=w).step_by(3) {
                for j in (i..=w).step_by(5) {
                    for y in 0..4 {
                        let q = IntervalQuery::new(y, i, j);
                        let f = o.interval_frequency(q).unwrap();
                        let e = r.interval_query(q).unwrap();
                        assert!(f <= e && e <= f + bound, "t={t} {q:?} f={f} e={e}");
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_with_ragged_blocks() {
        // s = 4 does not divide W = 54.
        let cfg = SketchConfig::new(54, 0.5);
        assert_eq!(validate_config(&cfg).unwrap().block_size, 4);
        sweep(cfg, (0..400u64).map(|t| (t * t + t / 3) % 4));
    }

    #[test]
    fn sandwich_deamortized() {
        let cfg = SketchConfig::new(84, 0.5).with_deamortize(true);
        sweep(cfg, (0..500u64).map(|t| [0, 0, 1, 0, 2, 3, 0, 1][(t % 8) as usize]));
    }
}
