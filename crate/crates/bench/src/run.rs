use std::collections::HashSet;
use std::time::{Duration, Instant};

use interval_sketch::{
    validate_config, Acc, BlockMode, ExactOracle, Hit, IntervalFrequency, IntervalQuery, ItemId, Params, QueryError,
    Raw, SketchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{ConfigReport, Report, SweepRow, TraceReport};
use crate::trace::{parse_trace, TraceSource};
use crate::{zipf_items, BenchError};

const ENTRY_BYTES: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Raw,
    Acc { k: u32 },
    Hit,
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Raw => "raw",
            Algo::Acc { .. } => "acc",
            Algo::Hit => "hit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    /// Interval lengths as percentages of the window. The first one drives
    /// the main run; each gets a row in the sweep.
    pub interval_pct: Vec<f64>,
    /// Queries per 1000 updates during the main run.
    pub query_rate: u64,
    /// Queries per sweep row, issued against the final state.
    pub sweep_queries: u64,
    pub seed: u64,
    /// Synthetic Zipf stream used when no trace is given.
    pub zipf_alpha: f64,
    pub zipf_universe: u64,
    pub zipf_count: usize,
}

impl Default for Workload {
    fn default() -> Self {
        Workload {
            interval_pct: vec![1.0],
            query_rate: 10,
            sweep_queries: 2000,
            seed: 0,
            zipf_alpha: 1.0,
            zipf_universe: 1 << 20,
            zipf_count: 1_000_000,
        }
    }
}

enum Sketch {
    Raw(Raw),
    Acc(Acc),
    Hit(Hit),
}

impl Sketch {
    fn new(algo: Algo, cfg: &SketchConfig) -> Result<Self, BenchError> {
        Ok(match algo {
            Algo::Raw => Sketch::Raw(Raw::new(cfg)?),
            Algo::Acc { k } => Sketch::Acc(Acc::new(&cfg.with_acc_levels(k))?),
            Algo::Hit => Sketch::Hit(Hit::new(cfg)?),
        })
    }

    fn freq(&mut self) -> &mut dyn IntervalFrequency {
        match self {
            Sketch::Raw(s) => s,
            Sketch::Acc(s) => s,
            Sketch::Hit(s) => s,
        }
    }

    fn query(&self, q: IntervalQuery) -> Result<u64, QueryError> {
        match self {
            Sketch::Raw(s) => s.interval_query(q),
            Sketch::Acc(s) => s.interval_query(q),
            Sketch::Hit(s) => s.interval_query(q),
        }
    }

    fn live_entries(&self) -> usize {
        match self {
            Sketch::Raw(s) => s.live_entries(),
            Sketch::Acc(s) => s.live_entries(),
            Sketch::Hit(s) => s.live_entries(),
        }
    }

    /// Solver tables read so far.
    fn table_reads(&self) -> Option<u64> {
        match self {
            Sketch::Raw(_) => None,
            Sketch::Acc(s) => Some(s.solver().reads()),
            Sketch::Hit(s) => Some(s.solver().lookups()),
        }
    }
}

#[derive(Default)]
struct ErrorTally {
    n: u64,
    sq: f64,
    max: u64,
}

impl ErrorTally {
    fn rmse(&self) -> Option<f64> {
        (self.n > 0).then(|| (self.sq / self.n as f64).sqrt())
    }
}

/// Replays the stream, querying as it goes, then sweeps interval sizes on the
/// final state. In oracle mode every answer is checked against the exact
/// count and the first one outside `[f, f + W*eps]` aborts the run.
pub fn run_bench(
    cfg: &SketchConfig,
    algo: Algo,
    trace: Option<&TraceSource>,
    wl: &Workload,
    oracle: bool,
) -> Result<Report, BenchError> {
    let cfg = match algo {
        Algo::Acc { k } => cfg.with_acc_levels(k),
        _ => *cfg,
    };
    let p = validate_config(&cfg)?;
    if wl.interval_pct.is_empty() || wl.interval_pct.iter().any(|&v| !(v > 0.0 && v <= 100.0)) {
        return Err(BenchError::WorkloadInvalid(format!("interval percentages {:?}", wl.interval_pct)));
    }
    let (items, trace_report) = load(trace, wl)?;
    let mut sketch = Sketch::new(algo, &cfg)?;
    let mut exact = oracle.then(|| ExactOracle::new(p.window));
    let mut r = ChaCha8Rng::seed_from_u64(wl.seed);

    let w = p.window as usize;
    let (warm, steady) = items.split_at(w.min(items.len()));
    sketch.freq().add_batch(warm);
    if let Some(o) = &mut exact {
        warm.iter().for_each(|&x| o.add(x));
    }

    let period = (1000 / wl.query_rate.max(1)).max(1) as usize;
    let per_round = (wl.query_rate / 1000).max(1);
    let main_len = interval_len(p.window, wl.interval_pct[0]);
    let mut update_time = Duration::ZERO;
    let mut query_time = Duration::ZERO;
    let mut queries = 0u64;
    let mut tally = ErrorTally::default();
    let mut entry_sum = 0u64;
    let mut rounds = 0u64;
    let mut seen = warm.len();
    for chunk in steady.chunks(period) {
        let t = Instant::now();
        sketch.freq().add_batch(chunk);
        update_time += t.elapsed();
        if let Some(o) = &mut exact {
            chunk.iter().for_each(|&x| o.add(x));
        }
        seen += chunk.len();
        let qs: Vec<IntervalQuery> =
            (0..per_round).map(|_| random_query(&mut r, &items[..seen], p.window, main_len)).collect();
        let (answers, took) = answer(&sketch, &qs)?;
        query_time += took;
        queries += qs.len() as u64;
        if let Some(o) = &exact {
            check(o, &qs, &answers, &p, &mut tally)?;
        }
        entry_sum += sketch.live_entries() as u64;
        rounds += 1;
    }

    let mut sweep = Vec::new();
    if seen >= w && seen > 0 {
        for &pct in &wl.interval_pct {
            let len = interval_len(p.window, pct);
            let qs: Vec<IntervalQuery> =
                (0..wl.sweep_queries).map(|_| random_query(&mut r, &items, p.window, len)).collect();
            let reads_before = sketch.table_reads();
            let (answers, took) = answer(&sketch, &qs)?;
            let mut row_tally = ErrorTally::default();
            if let Some(o) = &exact {
                check(o, &qs, &answers, &p, &mut row_tally)?;
            }
            let n = qs.len() as f64;
            sweep.push(SweepRow {
                interval_pct: pct,
                interval_len: len,
                queries: qs.len() as u64,
                queries_per_sec: rate(qs.len() as u64, took),
                table_reads: reads_before.zip(sketch.table_reads()).map(|(a, b)| (b - a) as f64 / n),
                rmse: row_tally.rmse(),
                max_err: oracle.then_some(row_tally.max),
            });
        }
    }

    let entries = entry_sum.checked_div(rounds).unwrap_or(sketch.live_entries() as u64);
    Ok(Report {
        config: ConfigReport {
            window: p.window,
            epsilon: p.epsilon,
            block_size: p.block_size,
            blocks: p.blocks,
            k: match algo {
                Algo::Acc { k } => Some(k),
                _ => None,
            },
            block_mode: match p.block_mode {
                BlockMode::Standard => "standard",
                BlockMode::Reduced => "reduced",
            }
            .to_string(),
            deamortize: p.deamortize,
            error_bound: p.error_bound(),
            seed: wl.seed,
            query_rate: wl.query_rate,
            interval_pct: wl.interval_pct.clone(),
            oracle,
            entry_bytes: ENTRY_BYTES,
        },
        algo: algo.name().to_string(),
        trace: trace_report,
        updates_per_sec: rate(steady.len() as u64, update_time),
        queries_per_sec: rate(queries, query_time),
        entries,
        bytes_model: entries * ENTRY_BYTES,
        rmse: tally.rmse(),
        max_err: oracle.then_some(tally.max),
        sweep,
    })
}

fn load(trace: Option<&TraceSource>, wl: &Workload) -> Result<(Vec<ItemId>, TraceReport), BenchError> {
    let distinct = |items: &[ItemId]| items.iter().collect::<HashSet<_>>().len() as u64;
    Ok(match trace {
        Some(src) => {
            let t = parse_trace(src)?;
            let report = TraceReport {
                source: src.name(),
                items: t.items.len() as u64,
                skipped: t.skipped,
                distinct: t.tokens.len() as u64,
                zipf_alpha: None,
                zipf_universe: None,
            };
            (t.items, report)
        }
        None => {
            let items = zipf_items(wl.zipf_alpha, wl.zipf_universe, wl.zipf_count, wl.seed)?;
            let report = TraceReport {
                source: "zipf".to_string(),
                items: items.len() as u64,
                skipped: 0,
                distinct: distinct(&items),
                zipf_alpha: Some(wl.zipf_alpha),
                zipf_universe: Some(wl.zipf_universe),
            };
            (items, report)
        }
    })
}

fn interval_len(window: u64, pct: f64) -> u64 {
    ((window as f64 * pct / 100.0).round() as u64).clamp(1, window)
}

/// An interval of `len` positions at a random place in the window, asking for
/// an item that occurs in it.
fn random_query(r: &mut impl Rng, prefix: &[ItemId], window: u64, len: u64) -> IntervalQuery {
    let i = r.random_range(0..=window - len);
    let j = i + len;
    let item = prefix[prefix.len() - r.random_range(i + 1..=j) as usize];
    IntervalQuery { item, i, j }
}

fn answer(sketch: &Sketch, qs: &[IntervalQuery]) -> Result<(Vec<u64>, Duration), BenchError> {
    let t = Instant::now();
    let answers = qs.iter().map(|&q| sketch.query(q)).collect::<Result<Vec<_>, _>>();
    let took = t.elapsed();
    let answers = answers.map_err(|e| BenchError::WorkloadInvalid(e.to_string()))?;
    Ok((answers, took))
}

fn check(
    o: &ExactOracle,
    qs: &[IntervalQuery],
    answers: &[u64],
    p: &Params,
    tally: &mut ErrorTally,
) -> Result<(), BenchError> {
    let bound = p.error_bound();
    for (&q, &estimate) in qs.iter().zip(answers) {
        let exact = o.interval_frequency(q).map_err(|e| BenchError::WorkloadInvalid(e.to_string()))?;
        if estimate < exact || estimate - exact > bound {
            return Err(BenchError::BoundViolation {
                at: o.seen(),
                item: q.item.0,
                i: q.i,
                j: q.j,
                estimate,
                exact,
                bound,
            });
        }
        let err = estimate - exact;
        tally.n += 1;
        tally.sq += (err * err) as f64;
        tally.max = tally.max.max(err);
    }
    Ok(())
}

fn rate(count: u64, took: Duration) -> Option<f64> {
    (count > 0 && !took.is_zero()).then(|| count as f64 / took.as_secs_f64())
}
