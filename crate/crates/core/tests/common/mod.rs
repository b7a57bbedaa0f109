#![allow(dead_code)]

use std::collections::VecDeque;

use interval_sketch::ItemId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn zipf_stream(seed: u64, len: usize, universe: u64, alpha: f64) -> Vec<ItemId> {
    let mut r = rng(seed);
    let z = Zipf::new(universe as f64, alpha).expect("valid zipf");
    (0..len).map(|_| ItemId(z.sample(&mut r) as u64)).collect()
}

/// Brute-force block stream: one list of keys per block, newest last.
#[derive(Debug, Clone)]
pub struct BlockOracle {
    blocks: VecDeque<Vec<u32>>,
    keep: usize,
}

impl BlockOracle {
    pub fn new(window: u64) -> Self {
        BlockOracle { blocks: VecDeque::from([Vec::new()]), keep: window as usize }
    }

    pub fn add(&mut self, x: u32) {
        self.blocks.back_mut().unwrap().push(x);
    }

    pub fn end_block(&mut self) {
        self.blocks.push_back(Vec::new());
        if self.blocks.len() > self.keep {
            self.blocks.pop_front();
        }
    }

    /// Adds of `x` in the blocks at recency `i+1 ..= j`.
    pub fn query(&self, x: u32, i: u64, j: u64) -> u64 {
        let n = self.blocks.len() as u64;
        (i..j.min(n)).map(|r| self.blocks[(n - 1 - r) as usize].iter().filter(|&&y| y == x).count() as u64).sum()
    }
}

/// A random block stream: per block, a random subset of `0..universe`, each
/// item at most once unless `repeats` is set.
pub fn random_blocks(seed: u64, blocks: usize, universe: u32, repeats: bool) -> Vec<Vec<u32>> {
    let mut r = rng(seed);
    (0..blocks)
        .map(|_| {
            let density = r.random_range(0.0..0.7);
            let mut b: Vec<u32> = (0..universe).filter(|_| r.random_bool(density)).collect();
            if repeats && !b.is_empty() && r.random_bool(0.3) {
                b.push(b[0]);
            }
            b
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct GridStats {
    pub queries: u64,
    pub mismatches: u64,
}

/// Feeds `stream` to `solver` and, at each block where `check_at` holds (after
/// the block's adds, before it closes), compares every `(x, i, j)` with
/// `0 <= i <= j <= window` against the brute-force oracle. `inspect` sees
/// every query too.
pub fn run_grid<S: interval_sketch::BlockIntervalSolver<u32>>(
    solver: &mut S,
    stream: &[Vec<u32>],
    universe: u32,
    check_at: impl Fn(usize) -> bool,
    mut inspect: impl FnMut(&S, u32, u64, u64),
) -> GridStats {
    let w = solver.window_blocks();
    let mut oracle = BlockOracle::new(w);
    let mut stats = GridStats::default();
    for (b, block) in stream.iter().enumerate() {
        for &x in block {
            solver.add(x);
            oracle.add(x);
        }
        if check_at(b) {
            for x in 0..universe {
                for i in 0..=w {
                    for j in i..=w {
                        stats.queries += 1;
                        if solver.block_interval_query(x, i, j).unwrap() != oracle.query(x, i, j) {
                            stats.mismatches += 1;
                        }
                        inspect(solver, x, i, j);
                    }
                }
            }
        }
        solver.end_block();
        oracle.end_block();
    }
    stats
}
