mod common;

use std::collections::HashMap;

use interval_sketch::SpaceSavingSummary;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Add(u8),
    Flush,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![20 => (0u8..12).prop_map(Op::Add), 1 => Just(Op::Flush)]
}

proptest! {
    #[test]
    fn invariants_hold(cap in 1usize..8, ops in prop::collection::vec(op(), 0..300)) {
        let mut ss = SpaceSavingSummary::<u8, u32>::new(cap);
        let mut exact: HashMap<u8, u64> = HashMap::new();
        for op in ops {
            match op {
                Op::Add(x) => {
                    let z = ss.inserted();
                    let (v, evicted) = ss.add_with_eviction(x);
                    *exact.entry(x).or_default() += 1;
                    if let Some((_, old)) = evicted {
                        // Only a minimal counter is reassigned.
                        prop_assert!(old as u64 * cap as u64 <= z);
                        prop_assert_eq!(v, old + 1);
                    }
                }
                Op::Flush => {
                    ss.flush();
                    exact.clear();
                }
            }
            let z = ss.inserted();
            prop_assert_eq!(ss.iter().map(|(_, v)| v as u64).sum::<u64>(), z);
            prop_assert!(ss.iter().count() <= cap);
            prop_assert!(ss.min_value() as u64 * cap as u64 <= z);
            let values: Vec<u32> = ss.iter().map(|(_, v)| v).collect();
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
            for x in 0..12u8 {
                let q = exact.get(&x).copied().unwrap_or(0);
                let e = ss.query(&x) as u64;
                prop_assert!(q <= e && (e - q) * cap as u64 <= z, "x={} q={} e={} z={}", x, q, e, z);
            }
        }
    }
}

#[test]
fn large_counters_persist_until_flush() {
    let cap = 16;
    let frame = 4000u64;
    let mut ss = SpaceSavingSummary::<u64, u32>::new(cap);
    let stream = common::zipf_stream(7, 3 * frame as usize, 500, 0.9);
    let block = frame / cap as u64;
    for (t, x) in stream.into_iter().enumerate() {
        if (t as u64).is_multiple_of(frame) {
            ss.flush();
        }
        let (_, evicted) = ss.add_with_eviction(x.0);
        if let Some((_, v)) = evicted {
            assert!((v as u64) < block, "counter of value {v} reassigned");
        }
    }
}
