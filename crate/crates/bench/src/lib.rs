//! Replays a trace or a synthetic Zipf stream through one interval sketch and
//! reports throughput, memory and, with the exact oracle on, accuracy.

mod report;
mod run;
mod trace;

pub use report::{ConfigReport, Report, SweepRow, TraceReport};
pub use run::{run_bench, Algo, Workload};
pub use trace::{parse_trace, Trace, TraceFormat, TraceSource};

use interval_sketch::{ConfigError, ItemId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("cannot read trace {path}: {source}")]
    TraceUnreadable { path: String, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(#[from] ConfigError),
    #[error("cannot write report {path}: {source}")]
    ReportUnwritable { path: String, source: std::io::Error },
    #[error("invalid workload: {0}")]
    WorkloadInvalid(String),
    #[error(
        "estimate {estimate} for item {item} over ({i}, {j}] at arrival {at} is outside [{exact}, {exact} + {bound}]"
    )]
    BoundViolation { at: u64, item: u64, i: u64, j: u64, estimate: u64, exact: u64, bound: u64 },
}

/// `count` draws from Zipf(`alpha`) over ranks `1..=universe`.
pub fn zipf_items(alpha: f64, universe: u64, count: usize, seed: u64) -> Result<Vec<ItemId>, BenchError> {
    let z = Zipf::new(universe as f64, alpha)
        .map_err(|e| BenchError::WorkloadInvalid(format!("zipf({alpha}, {universe}): {e}")))?;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| ItemId(z.sample(&mut r) as u64)).collect())
}
