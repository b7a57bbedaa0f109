//! Token traces: one token per line, or one column of a delimited file.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::PathBuf;

use interval_sketch::{ItemId, TokenInterner};

use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceFormat {
    Lines,
    /// 1-based column of a delimited file.
    Csv {
        column: usize,
        delimiter: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSource {
    pub format: TraceFormat,
    /// `None` reads standard input.
    pub path: Option<PathBuf>,
}

impl TraceSource {
    pub fn lines(path: impl Into<PathBuf>) -> Self {
        TraceSource { format: TraceFormat::Lines, path: Some(path.into()) }
    }

    pub fn csv(path: impl Into<PathBuf>, column: usize, delimiter: u8) -> Self {
        TraceSource { format: TraceFormat::Csv { column, delimiter }, path: Some(path.into()) }
    }

    pub fn name(&self) -> String {
        self.path.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub items: Vec<ItemId>,
    /// Malformed records: blank lines, missing columns, bad encoding.
    pub skipped: u64,
    pub tokens: TokenInterner,
}

impl Trace {
    pub fn token(&self, id: ItemId) -> Option<&[u8]> {
        self.tokens.token(id)
    }
}

/// Reads the whole trace. Ids are assigned in order of first appearance.
pub fn parse_trace(src: &TraceSource) -> Result<Trace, BenchError> {
    let unreadable = |source: io::Error| BenchError::TraceUnreadable { path: src.name(), source };
    let reader: Box<dyn Read> = match &src.path {
        Some(p) => Box::new(File::open(p).map_err(unreadable)?),
        None => Box::new(io::stdin().lock()),
    };
    let mut trace = Trace::default();
    match src.format {
        TraceFormat::Lines => {
            let mut r = BufReader::new(reader);
            let mut line = Vec::new();
            loop {
                line.clear();
                if r.read_until(b'\n', &mut line).map_err(unreadable)? == 0 {
                    break;
                }
                let token = line.trim_ascii();
                if token.is_empty() {
                    trace.skipped += 1;
                } else {
                    let id = trace.tokens.intern(token);
                    trace.items.push(id);
                }
            }
        }
        TraceFormat::Csv { column, delimiter } => {
            let mut r =
                csv::ReaderBuilder::new().has_headers(false).flexible(true).delimiter(delimiter).from_reader(reader);
            let mut record = csv::ByteRecord::new();
            loop {
                match r.read_byte_record(&mut record) {
                    Ok(false) => break,
                    Ok(true) => match column.checked_sub(1).and_then(|c| record.get(c)).map(<[u8]>::trim_ascii) {
                        Some(token) if !token.is_empty() => {
                            let id = trace.tokens.intern(token);
                            trace.items.push(id);
                        }
                        _ => trace.skipped += 1,
                    },
                    Err(e) if e.is_io_error() => {
                        let csv::ErrorKind::Io(source) = e.into_kind() else { unreachable!() };
                        return Err(unreadable(source));
                    }
                    Err(_) => trace.skipped += 1,
                }
            }
        }
    }
    Ok(trace)
}
