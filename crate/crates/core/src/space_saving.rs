//! Space Saving over a fixed set of shared counters.
//!
//! Counters live in a stream-summary: a list of value buckets in ascending
//! order, each holding its counters oldest-update first. The smallest bucket's
//! head is the least recently updated minimal counter, which is the one evicted.
//!
//! Flushing moves the whole bucket list onto a stale list and bumps the epoch.
//! Stale counters read as zero and are recycled before any live counter is
//! evicted, so a flush is O(1).

use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;

use crate::num::{Count, Key};

const NIL: u32 = u32::MAX;

pub(crate) fn key_hash<K: Key>(x: &K) -> u64 {
    FxBuildHasher.hash_one(x)
}

#[derive(Debug, Clone)]
struct Node<K> {
    key: K,
    bucket: u32,
    prev: u32,
    next: u32,
    epoch: u32,
}

#[derive(Debug, Clone)]
struct Bucket<C> {
    value: C,
    head: u32,
    tail: u32,
    prev: u32,
    next: u32,
}

#[derive(Debug, Clone, Copy)]
struct List {
    head: u32,
    tail: u32,
}

impl List {
    const EMPTY: List = List { head: NIL, tail: NIL };
}

#[derive(Debug, Clone)]
pub struct SpaceSavingSummary<K, C> {
    capacity: usize,
    nodes: Vec<Node<K>>,
    buckets: Vec<Bucket<C>>,
    free_buckets: Vec<u32>,
    /// Node ids, hashed by their keys.
    index: HashTable<u32>,
    live: List,
    stale: List,
    live_count: usize,
    epoch: u32,
    inserted: u64,
}

impl<K: Key, C: Count> SpaceSavingSummary<K, C> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0 && capacity < NIL as usize, "capacity out of range");
        SpaceSavingSummary {
            capacity,
            nodes: Vec::with_capacity(capacity),
            buckets: Vec::new(),
            free_buckets: Vec::new(),
            index: HashTable::with_capacity(capacity),
            live: List::EMPTY,
            stale: List::EMPTY,
            live_count: 0,
            epoch: 0,
            inserted: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Insertions since the last flush, `Z`.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    /// Counters holding a nonzero value.
    pub fn live_counters(&self) -> usize {
        self.live_count
    }

    /// Counts one arrival of `x` and returns its counter's new value.
    pub fn add(&mut self, x: K) -> C {
        self.add_with_eviction(x).0
    }

    /// Like [`Self::add`], also reporting the live counter `x` took over, if any.
    pub fn add_with_eviction(&mut self, x: K) -> (C, Option<(K, C)>) {
        self.add_hashed(x, key_hash(&x))
    }

    /// [`Self::add_with_eviction`] with `h = key_hash(&x)` already computed.
    pub(crate) fn add_hashed(&mut self, x: K, h: u64) -> (C, Option<(K, C)>) {
        self.inserted += 1;
        if let Some(&i) = self.find(h, &x) {
            if self.nodes[i as usize].epoch == self.epoch {
                return (self.increment(i), None);
            }
            self.detach(i, false);
            self.attach_fresh(i);
            return (C::one(), None);
        }
        if self.nodes.len() < self.capacity {
            let i = self.nodes.len() as u32;
            self.nodes.push(Node { key: x, bucket: NIL, prev: NIL, next: NIL, epoch: self.epoch });
            self.insert(h, i);
            self.attach_fresh(i);
            return (C::one(), None);
        }
        let stale = self.stale.head != NIL;
        let b = if stale { self.stale.head } else { self.live.head };
        let i = self.buckets[b as usize].head;
        let old = std::mem::replace(&mut self.nodes[i as usize].key, x);
        self.index.find_entry(key_hash(&old), |&j| j == i).expect("indexed node").remove();
        self.insert(h, i);
        if stale {
            self.detach(i, false);
            self.attach_fresh(i);
            return (C::one(), None);
        }
        let value = self.buckets[b as usize].value;
        (self.increment(i), Some((old, value)))
    }

    /// Counter value of `x` if it holds a live counter.
    pub fn counter(&self, x: &K) -> Option<C> {
        let &i = self.find(key_hash(x), x)?;
        let n = &self.nodes[i as usize];
        (n.epoch == self.epoch).then(|| self.buckets[n.bucket as usize].value)
    }

    /// Smallest counter value; zero while some counter is unused.
    pub fn min_value(&self) -> C {
        if self.live_count < self.capacity {
            C::zero()
        } else {
            self.buckets[self.live.head as usize].value
        }
    }

    /// Counter of `x`, or the minimal counter when `x` holds none.
    pub fn query(&self, x: &K) -> C {
        self.counter(x).unwrap_or_else(|| self.min_value())
    }

    /// Resets every counter to zero in constant time.
    pub fn flush(&mut self) {
        if self.live.head != NIL {
            if self.stale.head == NIL {
                self.stale = self.live;
            } else {
                self.buckets[self.stale.tail as usize].next = self.live.head;
                self.buckets[self.live.head as usize].prev = self.stale.tail;
                self.stale.tail = self.live.tail;
            }
            self.live = List::EMPTY;
        }
        self.live_count = 0;
        self.inserted = 0;
        if self.epoch == u32::MAX {
            // Every node is stale now; renumber so no old epoch can recur.
            self.nodes.iter_mut().for_each(|n| n.epoch = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Live `(key, value)` pairs in ascending value order.
    pub fn iter(&self) -> impl Iterator<Item = (K, C)> + '_ {
        let mut b = self.live.head;
        let mut i = NIL;
        std::iter::from_fn(move || loop {
            if i != NIL {
                let n = &self.nodes[i as usize];
                i = n.next;
                return Some((n.key, self.buckets[n.bucket as usize].value));
            }
            if b == NIL {
                return None;
            }
            i = self.buckets[b as usize].head;
            b = self.buckets[b as usize].next;
        })
    }

    fn find(&self, h: u64, x: &K) -> Option<&u32> {
        self.index.find(h, |&i| self.nodes[i as usize].key == *x)
    }

    fn insert(&mut self, h: u64, i: u32) {
        let Self { index, nodes, .. } = self;
        index.insert_unique(h, i, |&j| key_hash(&nodes[j as usize].key));
    }

    fn list(&mut self, live: bool) -> &mut List {
        if live {
            &mut self.live
        } else {
            &mut self.stale
        }
    }

    fn new_bucket(&mut self, value: C) -> u32 {
        let b = Bucket { value, head: NIL, tail: NIL, prev: NIL, next: NIL };
        match self.free_buckets.pop() {
            Some(id) => {
                self.buckets[id as usize] = b;
                id
            }
            None => {
                self.buckets.push(b);
                (self.buckets.len() - 1) as u32
            }
        }
    }

    /// Links bucket `b` into a list after `after`, or at the front when `after` is NIL.
    fn link_bucket(&mut self, b: u32, after: u32, live: bool) {
        let next = if after == NIL { self.list(live).head } else { self.buckets[after as usize].next };
        self.buckets[b as usize].prev = after;
        self.buckets[b as usize].next = next;
        if after == NIL {
            self.list(live).head = b;
        } else {
            self.buckets[after as usize].next = b;
        }
        if next == NIL {
            self.list(live).tail = b;
        } else {
            self.buckets[next as usize].prev = b;
        }
    }

    fn unlink_bucket(&mut self, b: u32, live: bool) {
        let Bucket { prev, next, .. } = self.buckets[b as usize];
        if prev == NIL {
            self.list(live).head = next;
        } else {
            self.buckets[prev as usize].next = next;
        }
        if next == NIL {
            self.list(live).tail = prev;
        } else {
            self.buckets[next as usize].prev = prev;
        }
        self.free_buckets.push(b);
    }

    fn push_node(&mut self, i: u32, b: u32) {
        let tail = self.buckets[b as usize].tail;
        let n = &mut self.nodes[i as usize];
        n.bucket = b;
        n.prev = tail;
        n.next = NIL;
        if tail == NIL {
            self.buckets[b as usize].head = i;
        } else {
            self.nodes[tail as usize].next = i;
        }
        self.buckets[b as usize].tail = i;
    }

    /// Removes node `i` from its bucket, dropping the bucket if it empties.
    fn detach(&mut self, i: u32, live: bool) {
        let Node { bucket: b, prev, next, .. } = self.nodes[i as usize];
        if prev == NIL {
            self.buckets[b as usize].head = next;
        } else {
            self.nodes[prev as usize].next = next;
        }
        if next == NIL {
            self.buckets[b as usize].tail = prev;
        } else {
            self.nodes[next as usize].prev = prev;
        }
        if self.buckets[b as usize].head == NIL {
            self.unlink_bucket(b, live);
        }
    }

    /// Gives the detached node `i` the value one under the current epoch.
    fn attach_fresh(&mut self, i: u32) {
        let head = self.live.head;
        let b = if head != NIL && self.buckets[head as usize].value == C::one() {
            head
        } else {
            let b = self.new_bucket(C::one());
            self.link_bucket(b, NIL, true);
            b
        };
        self.nodes[i as usize].epoch = self.epoch;
        self.live_count += 1;
        self.push_node(i, b);
    }

    fn increment(&mut self, i: u32) -> C {
        let b = self.nodes[i as usize].bucket;
        let Bucket { value, head, tail, next, .. } = self.buckets[b as usize];
        let v = value + C::one();
        let target = if next != NIL && self.buckets[next as usize].value == v {
            next
        } else if head == tail {
            // Sole member: the bucket itself moves up.
            self.buckets[b as usize].value = v;
            return v;
        } else {
            let t = self.new_bucket(v);
            self.link_bucket(t, b, true);
            t
        };
        self.detach(i, true);
        self.push_node(i, target);
        v
    }
}
