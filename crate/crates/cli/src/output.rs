use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use misocache::rational::{self, Rational};
use misocache::Value;
use serde::Serialize;
use tempfile::NamedTempFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Writes `body` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, body: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    match out {
        Some(path) => write_atomic(path, body),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Decimal for CSV cells.
pub fn decimal(v: &Value) -> String {
    v.to_f64().to_string()
}

pub fn exact(r: &Rational) -> String {
    rational::fmt_rational(r)
}

/// Longest exact rendering shown in text output.
const HUMAN_EXACT_CHARS: usize = 48;

/// `p/q (decimal)` for short exact values, the decimal alone otherwise.
pub fn human(v: &Value) -> String {
    match v {
        Value::Exact(r) if rational::is_integer(r) && r.numer().bits() < 128 => exact(r),
        Value::Exact(r) => {
            let p = exact(r);
            if p.len() <= HUMAN_EXACT_CHARS {
                format!("{p} ({})", rational::to_f64(r))
            } else {
                format!("{} (exact, {} digits)", rational::to_f64(r), p.len())
            }
        }
        Value::Approx(x) => x.to_string(),
    }
}
