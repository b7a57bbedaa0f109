use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub window: u64,
    pub epsilon: f64,
    pub block_size: u64,
    pub blocks: u64,
    pub k: Option<u32>,
    pub block_mode: String,
    pub deamortize: bool,
    pub error_bound: u64,
    pub seed: u64,
    pub query_rate: u64,
    pub interval_pct: Vec<f64>,
    pub oracle: bool,
    /// Bytes charged per live entry: an 8-byte id and a 4-byte count.
    pub entry_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// Trace path, `-` for standard input, or `zipf`.
    pub source: String,
    pub items: u64,
    pub skipped: u64,
    pub distinct: u64,
    pub zipf_alpha: Option<f64>,
    pub zipf_universe: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub interval_pct: f64,
    pub interval_len: u64,
    pub queries: u64,
    pub queries_per_sec: Option<f64>,
    /// Mean solver tables read per query; absent for RAW.
    pub table_reads: Option<f64>,
    pub rmse: Option<f64>,
    pub max_err: Option<u64>,
}

/// Outcome of one run. Field names are stable for downstream tooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ConfigReport,
    pub algo: String,
    pub trace: TraceReport,
    /// Steady state only, after the first full window.
    pub updates_per_sec: Option<f64>,
    pub queries_per_sec: Option<f64>,
    /// Mean live entries sampled at every query round.
    pub entries: u64,
    pub bytes_model: u64,
    pub rmse: Option<f64>,
    pub max_err: Option<u64>,
    pub sweep: Vec<SweepRow>,
}

impl Report {
    /// SHA-256 of the report with every timing field blanked.
    pub fn digest(&self) -> String {
        let mut r = self.clone();
        r.updates_per_sec = None;
        r.queries_per_sec = None;
        r.sweep.iter_mut().for_each(|s| s.queries_per_sec = None);
        let bytes = serde_json::to_vec(&r).expect("report serializes");
        Sha256::digest(&bytes).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn summary(&self) -> String {
        let rate = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.0}/s"));
        let mut s = String::new();
        let k = self.config.k.map(|k| format!(" k={k}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{}{k} W={} eps={} ({} blocks of {}), trace {} ({} items, {} skipped)",
            self.algo,
            self.config.window,
            self.config.epsilon,
            self.config.blocks,
            self.config.block_size,
            self.trace.source,
            self.trace.items,
            self.trace.skipped
        );
        let _ = writeln!(s, "updates {}  queries {}", rate(self.updates_per_sec), rate(self.queries_per_sec));
        let _ = writeln!(s, "entries {}  bytes {}", self.entries, self.bytes_model);
        if let (Some(rmse), Some(max)) = (self.rmse, self.max_err) {
            let _ = writeln!(s, "rmse {rmse:.3}  max error {max} (bound {})", self.config.error_bound);
        }
        for row in &self.sweep {
            let reads = row.table_reads.map(|r| format!("  reads/query {r:.2}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "  interval {}% ({}): {}{reads}",
                row.interval_pct,
                row.interval_len,
                rate(row.queries_per_sec)
            );
        }
        let _ = write!(s, "digest {}", self.digest());
        s
    }
}
