//! Stream model: item identifiers, recency-indexed interval queries, sketch
//! configuration and the exact reference oracle.
//!
//! Recency index `w` names the `w`-th most recent element, so index 1 is the
//! newest arrival. A query `(x, i, j)` counts `x` at recency `i+1 ..= j`.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::error::{ConfigError, QueryError};

/// Interned stream element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(pub u64);

impl From<u64> for ItemId {
    fn from(v: u64) -> Self {
        ItemId(v)
    }
}

/// Maps raw byte-string tokens to dense [`ItemId`]s and back.
#[derive(Debug, Default, Clone)]
pub struct TokenInterner {
    ids: FxHashMap<Box<[u8]>, ItemId>,
    tokens: Vec<Box<[u8]>>,
}

impl TokenInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, token: &[u8]) -> ItemId {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = ItemId(self.tokens.len() as u64);
        self.tokens.push(token.into());
        self.ids.insert(token.into(), id);
        id
    }

    pub fn get(&self, token: &[u8]) -> Option<ItemId> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: ItemId) -> Option<&[u8]> {
        self.tokens.get(id.0 as usize).map(|t| &t[..])
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Frequency query over recency positions `i+1 ..= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalQuery {
    pub item: ItemId,
    pub i: u64,
    pub j: u64,
}

impl IntervalQuery {
    pub fn new(item: impl Into<ItemId>, i: u64, j: u64) -> Self {
        IntervalQuery { item: item.into(), i, j }
    }

    /// Rejects `i > j`, `j > window` and intervals reaching before the first
    /// element.
    pub fn check(&self, window: u64, seen: u64) -> Result<(), QueryError> {
        if self.i > self.j || self.j > window {
            return Err(QueryError::IndexBeyondWindow { i: self.i, j: self.j, window });
        }
        if self.j > seen {
            return Err(QueryError::WindowNotFull { seen, window: self.j });
        }
        Ok(())
    }
}

/// Common interface of every interval frequency sketch in the crate.
pub trait IntervalFrequency {
    fn add(&mut self, x: ItemId);

    /// Adds `xs` in order. Same result as repeated [`Self::add`].
    fn add_batch(&mut self, xs: &[ItemId]) {
        xs.iter().for_each(|&x| self.add(x));
    }

    /// Estimate `f` of `q.item` in the interval with `f <= estimate <= f + W*eps`.
    fn interval_query(&self, q: IntervalQuery) -> Result<u64, QueryError>;

    /// Largest admissible `j`.
    fn window(&self) -> u64;

    /// Elements added so far.
    fn seen(&self) -> u64;

    /// Number of (key, count) pairs currently held, across all tables and counters.
    fn live_entries(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockMode {
    /// Blocks of `W*eps/6` elements, end blocks always included.
    #[default]
    Standard,
    /// Blocks of `W*eps/5` elements, end blocks included only past their midpoint.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchConfig {
    pub window: u64,
    pub epsilon: f64,
    /// Number of ACC levels; ignored by the other algorithms.
    pub acc_levels: Option<u32>,
    pub block_mode: BlockMode,
    pub deamortize: bool,
}

impl SketchConfig {
    pub fn new(window: u64, epsilon: f64) -> Self {
        SketchConfig { window, epsilon, acc_levels: None, block_mode: BlockMode::Standard, deamortize: false }
    }

    pub fn with_acc_levels(mut self, k: u32) -> Self {
        self.acc_levels = Some(k);
        self
    }

    pub fn with_block_mode(mut self, mode: BlockMode) -> Self {
        self.block_mode = mode;
        self
    }

    pub fn with_deamortize(mut self, on: bool) -> Self {
        self.deamortize = on;
        self
    }
}

/// Constants derived from a validated [`SketchConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub window: u64,
    pub epsilon: f64,
    pub eps_inv: u64,
    /// Elements per block, `s`.
    pub block_size: u64,
    /// Blocks per frame, `n`. The last block of a frame is shorter when
    /// `s` does not divide `W`.
    pub blocks: u64,
    /// Upper bound on block events in a window, `N = 2n`.
    pub max_events: u64,
    pub acc_levels: Option<u32>,
    /// ACC segment arity, when `acc_levels` is set.
    pub acc_arity: Option<u64>,
    pub block_mode: BlockMode,
    pub deamortize: bool,
}

impl Params {
    /// Blocks of `s` elements in the estimate correction.
    pub fn correction_blocks(&self) -> u64 {
        2 + self.deamortize as u64
    }

    /// Space Saving capacity, `n` counters.
    pub fn counters(&self) -> u64 {
        self.blocks
    }

    /// Block recencies a query can touch: the open block plus `n` completed ones.
    pub fn solver_blocks(&self) -> u64 {
        self.blocks + 1
    }

    /// Absolute error bound `W*eps`.
    pub fn error_bound(&self) -> u64 {
        self.window / self.eps_inv
    }
}

/// Returns `1/eps` when it is an integer (within float noise).
pub fn epsilon_inverse(epsilon: f64) -> Result<u64, ConfigError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(ConfigError::NonIntegerEpsilonInverse(epsilon));
    }
    let inv = 1.0 / epsilon;
    let r = inv.round();
    if (inv - r).abs() > 1e-9 * r {
        return Err(ConfigError::NonIntegerEpsilonInverse(epsilon));
    }
    Ok(r as u64)
}

/// `d = round(n^(1/k))`, rejecting arities below 2.
pub fn acc_arity(blocks: u64, levels: u32) -> Result<u64, ConfigError> {
    if levels == 0 {
        return Err(ConfigError::BadAccArity { blocks, levels });
    }
    if levels == 1 {
        return Ok(blocks);
    }
    let d = (blocks as f64).powf(1.0 / levels as f64).round() as u64;
    if d < 2 {
        return Err(ConfigError::BadAccArity { blocks, levels });
    }
    Ok(d)
}

pub fn validate_config(cfg: &SketchConfig) -> Result<Params, ConfigError> {
    if cfg.window == 0 {
        return Err(ConfigError::EmptyWindow);
    }
    let eps_inv = epsilon_inverse(cfg.epsilon)?;
    let divisor = match cfg.block_mode {
        BlockMode::Standard => 6,
        BlockMode::Reduced => 5,
    } + cfg.deamortize as u64;
    let block_size = cfg.window / (divisor * eps_inv);
    if block_size == 0 {
        return Err(ConfigError::BlockTooSmall { window: cfg.window, epsilon: cfg.epsilon });
    }
    let blocks = cfg.window.div_ceil(block_size);
    let acc_arity = cfg.acc_levels.map(|k| acc_arity(blocks, k)).transpose()?;
    Ok(Params {
        window: cfg.window,
        epsilon: cfg.epsilon,
        eps_inv,
        block_size,
        blocks,
        max_events: 2 * blocks,
        acc_levels: cfg.acc_levels,
        acc_arity,
        block_mode: cfg.block_mode,
        deamortize: cfg.deamortize,
    })
}

/// Exact frequencies over the last `W` elements.
///
/// Keeps the raw window plus, per item, the absolute positions of its
/// occurrences so interval counts are two binary searches.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    window: u64,
    buffer: VecDeque<ItemId>,
    positions: FxHashMap<ItemId, VecDeque<u64>>,
    seen: u64,
}

impl ExactOracle {
    pub fn new(window: u64) -> Self {
        assert!(window > 0, "window must be positive");
        ExactOracle {
            window,
            buffer: VecDeque::with_capacity(window as usize),
            positions: FxHashMap::default(),
            seen: 0,
        }
    }

    pub fn add(&mut self, x: ItemId) {
        if self.buffer.len() as u64 == self.window {
            let old = self.buffer.pop_front().expect("full buffer");
            let q = self.positions.get_mut(&old).expect("tracked item");
            q.pop_front();
            if q.is_empty() {
                self.positions.remove(&old);
            }
        }
        self.seen += 1;
        self.buffer.push_back(x);
        self.positions.entry(x).or_default().push_back(self.seen);
    }

    pub fn len(&self) -> u64 {
        self.buffer.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    /// Retained elements, oldest first.
    pub fn buffer(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.buffer.iter().copied()
    }

    /// Distinct items in the retained window.
    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.positions.keys().copied()
    }

    pub fn interval_frequency(&self, q: IntervalQuery) -> Result<u64, QueryError> {
        let len = self.len();
        if q.i > q.j || q.j > len {
            return Err(QueryError::IndexBeyondWindow { i: q.i, j: q.j, window: len });
        }
        let Some(pos) = self.positions.get(&q.item) else {
            return Ok(0);
        };
        // Recency r is absolute position seen - r + 1.
        let lo = self.seen - q.j + 1;
        let hi = self.seen - q.i;
        let a = pos.partition_point(|&p| p < lo);
        let b = pos.partition_point(|&p| p <= hi);
        Ok((b - a) as u64)
    }

    /// Linear scan of the buffer. Reference for [`Self::interval_frequency`].
    pub fn scan_frequency(&self, q: IntervalQuery) -> Result<u64, QueryError> {
        let len = self.len();
        if q.i > q.j || q.j > len {
            return Err(QueryError::IndexBeyondWindow { i: q.i, j: q.j, window: len });
        }
        let n = self.buffer.len();
        Ok((q.i..q.j).filter(|&r| self.buffer[n - 1 - r as usize] == q.item).count() as u64)
    }

    /// Items whose count at recency `i+1 ..= j` is at least `threshold`.
    pub fn heavy_hitters(&self, i: u64, j: u64, threshold: f64) -> Vec<(ItemId, u64)> {
        let mut out: Vec<_> = self
            .items()
            .filter_map(|x| {
                let f = self.interval_frequency(IntervalQuery::new(x, i, j)).ok()?;
                (f as f64 >= threshold).then_some((x, f))
            })
            .collect();
        out.sort_unstable();
        out
    }
}
