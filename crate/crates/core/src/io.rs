//! Text formats.
//!
//! Signals: a pragma line `# n=<length>`, the header `index,re,im`, then one
//! row per nonzero entry. Autocorrelations: `# n=<length>`, `lag,re,im`, one
//! row per lag. Distance and support sets: one integer per line, ascending.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{Autocorrelation, SparseSignal, C64};

const SIGNAL_HEADER: &str = "index,re,im";
const AUTOCORR_HEADER: &str = "lag,re,im";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn format_signal(x: &SparseSignal) -> String {
    let mut s = format!("# n={}\n{SIGNAL_HEADER}\n", x.n());
    for &(i, v) in x.entries() {
        writeln!(s, "{i},{},{}", v.re, v.im).unwrap();
    }
    s
}

pub fn format_autocorrelation(a: &Autocorrelation) -> String {
    let mut s = format!("# n={}\n{AUTOCORR_HEADER}\n", a.n());
    for (i, v) in a.values().iter().enumerate() {
        writeln!(s, "{i},{},{}", v.re, v.im).unwrap();
    }
    s
}

pub fn format_set(v: &[usize]) -> String {
    v.iter().map(|x| format!("{x}\n")).collect()
}

/// `(line, index, value)`, line numbers 1-based.
type Row = (usize, usize, C64);

/// Splits a CSV with a `# n=` pragma and a fixed header into `(n, rows)`.
fn parse_table(text: &str, header: &str) -> Result<(usize, Vec<Row>)> {
    let mut n = None;
    let mut seen_header = false;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(pragma) = line.strip_prefix('#') {
            if let Some(v) = pragma.trim().strip_prefix("n=") {
                let len: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad length pragma {v:?}")))?;
                n = Some(len);
            }
            continue;
        }
        if !seen_header {
            if line != header {
                return Err(parse_err(line_no, format!("expected header {header:?}, got {line:?}")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 3 fields, got {}", fields.len())));
        }
        let idx: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad index {:?}", fields[0])))?;
        let re: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad real part {:?}", fields[1])))?;
        let im: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad imaginary part {:?}", fields[2])))?;
        rows.push((line_no, idx, C64::new(re, im)));
    }
    if !seen_header {
        return Err(parse_err(0, format!("missing header {header:?}")));
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `# n=<length>` pragma"))?;
    Ok((n, rows))
}

pub fn parse_signal(text: &str) -> Result<SparseSignal> {
    let (n, rows) = parse_table(text, SIGNAL_HEADER)?;
    let mut entries = Vec::with_capacity(rows.len());
    let mut prev: Option<usize> = None;
    for (line, idx, v) in rows {
        if prev.is_some_and(|p| idx <= p) {
            return Err(parse_err(line, "indices must be strictly increasing"));
        }
        if idx >= n {
            return Err(parse_err(line, format!("index {idx} out of range for n={n}")));
        }
        prev = Some(idx);
        entries.push((idx, v));
    }
    SparseSignal::new(n, entries)
}

pub fn parse_autocorrelation(text: &str) -> Result<Autocorrelation> {
    let (n, rows) = parse_table(text, AUTOCORR_HEADER)?;
    if rows.len() != n {
        return Err(parse_err(0, format!("expected {n} lags, got {}", rows.len())));
    }
    for (expected, &(line, lag, _)) in rows.iter().enumerate() {
        if lag != expected {
            return Err(parse_err(line, format!("expected lag {expected}, got {lag}")));
        }
    }
    Autocorrelation::new(rows.into_iter().map(|r| r.2).collect())
}

pub fn parse_set(text: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line
            .parse()
            .map_err(|_| parse_err(lineno + 1, format!("bad integer {line:?}")))?;
        if out.last().is_some_and(|&p| v <= p) {
            return Err(parse_err(lineno + 1, "set must be strictly ascending"));
        }
        out.push(v);
    }
    Ok(out)
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    if let Err(e) = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path)) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

pub fn read_signal(path: &Path) -> Result<SparseSignal> {
    parse_signal(&std::fs::read_to_string(path)?)
}

pub fn read_autocorrelation(path: &Path) -> Result<Autocorrelation> {
    parse_autocorrelation(&std::fs::read_to_string(path)?)
}

pub fn read_set(path: &Path) -> Result<Vec<usize>> {
    parse_set(&std::fs::read_to_string(path)?)
}
