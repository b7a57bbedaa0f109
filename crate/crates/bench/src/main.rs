use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use interval_bench::{run_bench, Algo, BenchError, TraceFormat, TraceSource, Workload};
use interval_sketch::{BlockMode, SketchConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Raw,
    Acc,
    Hit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Reduced,
}

/// Replay a token trace or a Zipf stream through an interval frequency sketch.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Args {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Relative error, as `2^-E` or a decimal such as `0.0078125`.
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: f64,
    /// Window size, as `2^P` or an integer.
    #[arg(long, value_parser = parse_window)]
    window: u64,
    /// ACC levels.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Token trace, one per line; `-` reads standard input.
    #[arg(long, conflicts_with_all = ["zipf", "universe", "count"])]
    trace: Option<PathBuf>,
    /// Take tokens from this 1-based column of a delimited trace.
    #[arg(long, requires = "trace")]
    csv_column: Option<usize>,
    #[arg(long, default_value = ",", requires = "csv_column")]
    delimiter: char,
    /// Zipf skew of the synthetic stream.
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    #[arg(long, default_value_t = 1 << 20)]
    universe: u64,
    #[arg(long, default_value_t = 1_000_000)]
    count: usize,
    /// Check every answer against an exact oracle.
    #[arg(long)]
    oracle: bool,
    /// Interval sizes in percent of the window, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    interval_pct: Vec<f64>,
    /// Queries per 1000 updates.
    #[arg(long, default_value_t = 10)]
    query_rate: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    block_mode: ModeArg,
    #[arg(long)]
    deamortize: bool,
    /// Where to write the JSON report.
    #[arg(long)]
    out: PathBuf,
}

fn parse_power(s: &str) -> Option<i32> {
    s.trim().strip_prefix("2^")?.parse().ok()
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let v = match parse_power(s) {
        Some(e) => 2f64.powi(e),
        None => s.parse().map_err(|_| format!("expected 2^-E or a number, got {s}"))?,
    };
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("epsilon must lie in (0, 1], got {v}"))
    }
}

fn parse_window(s: &str) -> Result<u64, String> {
    match parse_power(s) {
        Some(p) if (0..64).contains(&p) => Ok(1 << p),
        Some(p) => Err(format!("2^{p} is out of range")),
        None => s.parse().map_err(|_| format!("expected 2^P or an integer, got {s}")),
    }
}

fn run(args: Args) -> Result<(), BenchError> {
    let mode = match args.block_mode {
        ModeArg::Standard => BlockMode::Standard,
        ModeArg::Reduced => BlockMode::Reduced,
    };
    let cfg = SketchConfig::new(args.window, args.epsilon).with_block_mode(mode).with_deamortize(args.deamortize);
    let algo = match args.algo {
        AlgoArg::Raw => Algo::Raw,
        AlgoArg::Acc => Algo::Acc { k: args.k },
        AlgoArg::Hit => Algo::Hit,
    };
    if !args.delimiter.is_ascii() {
        return Err(BenchError::WorkloadInvalid(format!("delimiter {:?} is not ASCII", args.delimiter)));
    }
    let trace = args.trace.map(|p| {
        let path = (p.as_os_str() != "-").then_some(p);
        let format = match args.csv_column {
            Some(column) => TraceFormat::Csv { column, delimiter: args.delimiter as u8 },
            None => TraceFormat::Lines,
        };
        TraceSource { format, path }
    });
    let wl = Workload {
        interval_pct: args.interval_pct,
        query_rate: args.query_rate,
        seed: args.seed,
        zipf_alpha: args.zipf,
        zipf_universe: args.universe,
        zipf_count: args.count,
        ..Workload::default()
    };
    let report = run_bench(&cfg, algo, trace.as_ref(), &wl, args.oracle)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&args.out, json + "\n")
        .map_err(|source| BenchError::ReportUnwritable { path: args.out.display().to_string(), source })?;
    println!("{}", report.summary());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::FAILURE
        }
    }
}
