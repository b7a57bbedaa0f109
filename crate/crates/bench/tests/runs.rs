use interval_bench::{run_bench, Algo, BenchError, Report, Workload};
use interval_sketch::{BlockMode, SketchConfig};

fn zipf(count: usize, seed: u64) -> Workload {
    Workload { zipf_alpha: 1.0, zipf_universe: 1 << 16, zipf_count: count, seed, ..Workload::default() }
}

fn cfg() -> SketchConfig {
    SketchConfig::new(1 << 13, 1.0 / 64.0)
}

#[test]
fn oracle_run_hit_has_no_violations() {
    let r = run_bench(&cfg(), Algo::Hit, None, &zipf(120_000, 1), true).unwrap();
    assert!(r.max_err.unwrap() <= r.config.error_bound);
    assert!(r.rmse.unwrap() < r.config.error_bound as f64);
    assert!(r.updates_per_sec.unwrap() > 0.0);
}

#[test]
fn oracle_runs_every_algorithm() {
    let small = SketchConfig::new(1 << 10, 1.0 / 16.0);
    for algo in [Algo::Raw, Algo::Acc { k: 1 }, Algo::Acc { k: 3 }, Algo::Hit] {
        for cfg in [small, small.with_block_mode(BlockMode::Reduced), small.with_deamortize(true)] {
            if algo == Algo::Raw && cfg != small {
                continue;
            }
            let r = run_bench(&cfg, algo, None, &zipf(20_000, 3), true);
            assert!(r.is_ok(), "{algo:?} {cfg:?}: {:?}", r.err());
        }
    }
}

#[test]
fn more_acc_levels_fewer_entries() {
    let wl = zipf(60_000, 2);
    let k1 = run_bench(&cfg(), Algo::Acc { k: 1 }, None, &wl, false).unwrap();
    let k8 = run_bench(&cfg(), Algo::Acc { k: 8 }, None, &wl, false).unwrap();
    assert!(k8.entries < k1.entries, "k=8 {} vs k=1 {}", k8.entries, k1.entries);
    assert_eq!(k8.bytes_model, k8.entries * k8.config.entry_bytes);
}

#[test]
fn reports_are_deterministic() {
    let wl = Workload { interval_pct: vec![1.0, 10.0], ..zipf(30_000, 5) };
    let run = || run_bench(&cfg(), Algo::Acc { k: 2 }, None, &wl, true).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.digest(), b.digest());
    let blank = |mut r: Report| {
        r.updates_per_sec = None;
        r.queries_per_sec = None;
        r.sweep.iter_mut().for_each(|s| s.queries_per_sec = None);
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(blank(a.clone()), blank(b));

    let other = run_bench(&cfg(), Algo::Acc { k: 2 }, None, &Workload { seed: 6, ..wl.clone() }, true).unwrap();
    assert_ne!(a.digest(), other.digest());
}

#[test]
fn hit_sweep_reads_grow_with_interval() {
    // Table reads per query stand in for query time, which is too noisy to
    // compare on a shared machine.
    let wl = Workload { interval_pct: vec![1.0, 5.0, 10.0, 15.0, 30.0, 50.0], ..zipf(40_000, 4) };
    let r = run_bench(&cfg(), Algo::Hit, None, &wl, false).unwrap();
    let reads: Vec<f64> = r.sweep.iter().map(|s| s.table_reads.unwrap()).collect();
    assert_eq!(reads.len(), 6);
    assert!(reads.windows(2).all(|w| w[0] <= w[1]), "{reads:?}");
}

#[test]
fn report_keys_are_stable() {
    let r = run_bench(&SketchConfig::new(512, 0.125), Algo::Raw, None, &zipf(3000, 0), false).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "algo",
            "bytes_model",
            "config",
            "entries",
            "max_err",
            "queries_per_sec",
            "rmse",
            "sweep",
            "trace",
            "updates_per_sec"
        ]
    );
    assert!(v["rmse"].is_null() && v["max_err"].is_null());
}

#[test]
fn bad_inputs_are_rejected() {
    let wl = zipf(100, 0);
    assert!(matches!(
        run_bench(&SketchConfig::new(100, 0.3), Algo::Hit, None, &wl, false),
        Err(BenchError::ConfigInvalid(_))
    ));
    let bad = Workload { interval_pct: vec![0.0], ..wl };
    assert!(matches!(run_bench(&cfg(), Algo::Hit, None, &bad, false), Err(BenchError::WorkloadInvalid(_))));
}
