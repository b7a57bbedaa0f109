//! Redundant approximate windows: one fixed-window estimator per multiple of
//! `u = W*eps/4`, differenced to answer interval queries.
//!
//! Instance `l` covers the last `l*u` elements (capped at `W`) with error
//! below `u`. A query `(i, j)` reads the instances rounded outward,
//! `A[ceil(j/u)] - A[floor(i/u)] + u`, where `A[0]` is identically zero. Each
//! side contributes at most `u - 1` of rounding and `u - 1` of instance error,
//! so the result lies in `[f + 1, f + 4u - 3]`.

use crate::error::{ConfigError, QueryError};
use crate::fixed_window::FixedWindowEstimator;
use crate::num::Count;
use crate::space_saving::key_hash;
use crate::stream::{epsilon_inverse, IntervalFrequency, IntervalQuery, ItemId, SketchConfig};

#[derive(Debug, Clone)]
pub struct RawSketch<C> {
    window: u64,
    granule: u64,
    instances: Vec<FixedWindowEstimator<ItemId, C>>,
    seen: u64,
    instance_updates: u64,
}

impl<C: Count> RawSketch<C> {
    pub fn new(cfg: &SketchConfig) -> Result<Self, ConfigError> {
        if cfg.window == 0 {
            return Err(ConfigError::EmptyWindow);
        }
        let eps_inv = epsilon_inverse(cfg.epsilon)?;
        let granule = cfg.window / (4 * eps_inv);
        if granule < 4 {
            return Err(ConfigError::BlockTooSmall { window: cfg.window, epsilon: cfg.epsilon });
        }
        let count = cfg.window.div_ceil(granule);
        let instances = (1..=count)
            .map(|l| FixedWindowEstimator::with_error_budget((l * granule).min(cfg.window), granule))
            .collect();
        Ok(RawSketch { window: cfg.window, granule, instances, seen: 0, instance_updates: 0 })
    }

    /// Window granularity `u`.
    pub fn granule(&self) -> u64 {
        self.granule
    }

    pub fn instances(&self) -> usize {
        self.instances.len()
    }

    /// Instance updates performed since construction.
    pub fn instance_updates(&self) -> u64 {
        self.instance_updates
    }

    /// Space Saving counters allocated across all instances.
    pub fn counters(&self) -> usize {
        self.instances.iter().map(|a| a.counters()).sum()
    }

    /// Instance indices read by a query, `(floor(i/u), ceil(j/u))`.
    pub fn instances_for(&self, i: u64, j: u64) -> (usize, usize) {
        ((i / self.granule) as usize, j.div_ceil(self.granule) as usize)
    }

    fn instance_query(&self, l: usize, x: ItemId) -> Result<u64, QueryError> {
        if l == 0 {
            return Ok(0);
        }
        self.instances[l - 1].query(&x)
    }
}

impl<C: Count> IntervalFrequency for RawSketch<C> {
    fn add(&mut self, x: ItemId) {
        self.seen += 1;
        for a in &mut self.instances {
            a.add(x);
        }
        self.instance_updates += self.instances.len() as u64;
    }

    /// Feeds the batch to one instance at a time, which keeps each
    /// instance's counters cache resident while it works through the batch.
    fn add_batch(&mut self, xs: &[ItemId]) {
        let hashed: Vec<(ItemId, u64)> = xs.iter().map(|x| (*x, key_hash(x))).collect();
        for a in &mut self.instances {
            hashed.iter().for_each(|&(x, h)| a.add_hashed(x, h));
        }
        self.seen += xs.len() as u64;
        self.instance_updates += (xs.len() * self.instances.len()) as u64;
    }

    fn interval_query(&self, q: IntervalQuery) -> Result<u64, QueryError> {
        q.check(self.window, self.seen)?;
        let (lo, hi) = self.instances_for(q.i, q.j);
        let upper = self.instance_query(hi, q.item)?;
        let lower = self.instance_query(lo, q.item)?;
        Ok((upper + self.granule).saturating_sub(lower))
    }

    fn window(&self) -> u64 {
        self.window
    }

    fn seen(&self) -> u64 {
        self.seen
    }

    fn live_entries(&self) -> usize {
        self.instances.iter().map(|a| a.live_entries()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_layout() {
        let mut r = RawSketch::<u32>::new(&SketchConfig::new(64, 0.25)).unwrap();
        assert_eq!((r.granule(), r.instances()), (4, 16));
        r.add(ItemId(9));
        assert_eq!(r.instance_updates(), 16);
        assert_eq!(r.instances_for(0, 10), (0, 3));
        assert_eq!(r.instances_for(5, 8), (1, 2));
    }

    #[test]
    fn homogeneous_window() {
        let w = 256;
        let mut r = RawSketch::<u32>::new(&SketchConfig::new(w, 1.0 / 8.0)).unwrap();
        for _ in 0..3 * w {
            r.add(ItemId(1));
        }
        let e = r.interval_query(IntervalQuery::new(1, 0, w)).unwrap();
        assert!(w <= e && e <= w + w / 8, "{e}");
        let e = r.interval_query(IntervalQuery::new(1, 0, 0)).unwrap();
        assert!(e <= w / 8);
    }

    #[test]
    fn needs_full_instances() {
        let mut r = RawSketch::<u32>::new(&SketchConfig::new(64, 0.25)).unwrap();
        (0..10).for_each(|v| r.add(ItemId(v)));
        assert!(r.interval_query(IntervalQuery::new(1, 0, 10)).is_err());
        assert!(r.interval_query(IntervalQuery::new(1, 0, 8)).is_ok());
        assert!(matches!(r.interval_query(IntervalQuery::new(1, 0, 65)), Err(QueryError::IndexBeyondWindow { .. })));
    }

    #[test]
    fn tiny_epsilon_rejected() {
        assert!(matches!(
            RawSketch::<u32>::new(&SketchConfig::new(16, 1.0 / 8.0)),
            Err(ConfigError::BlockTooSmall { .. })
        ));
    }
}
