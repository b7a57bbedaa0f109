use rustc_hash::FxHashMap;

use crate::num::{Count, Key};

/// Map from key to a positive count.
#[derive(Debug, Clone)]
pub struct LevelTable<K, C> {
    entries: FxHashMap<K, C>,
}

impl<K, C> Default for LevelTable<K, C> {
    fn default() -> Self {
        LevelTable { entries: FxHashMap::default() }
    }
}

impl<K: Key, C: Count> LevelTable<K, C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &K) -> u64 {
        self.entries.get(x).map_or(0, |c| c.as_u64())
    }

    pub fn increment(&mut self, x: K) {
        *self.entries.entry(x).or_insert_with(C::zero) += C::one();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn keys(&self) -> impl Iterator<Item = K> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, u64)> + '_ {
        self.entries.iter().map(|(k, c)| (*k, c.as_u64()))
    }

    /// Entrywise sum, built by copying the larger table.
    pub fn merged(a: &Self, b: &Self) -> Self {
        let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut out = big.clone();
        for (k, c) in &small.entries {
            *out.entries.entry(*k).or_insert_with(C::zero) += *c;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_sums_shared_keys() {
        let mut a = LevelTable::<u32, u32>::new();
        let mut b = LevelTable::new();
        [1, 1, 2].into_iter().for_each(|x| a.increment(x));
        [2, 3].into_iter().for_each(|x| b.increment(x));
        let m = LevelTable::merged(&a, &b);
        assert_eq!((m.get(&1), m.get(&2), m.get(&3), m.get(&4)), (2, 2, 1, 0));
        assert_eq!(m.len(), 3);
    }
}
