use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

use super::curve::CurveRow;

pub const CURVE_HEADER: &str = "n,k,trials,successes,rate,mean_residual,mean_ms";

/// Run metadata written next to the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    /// Omitted for byte-stable output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub plot: PathBuf,
    pub manifest: PathBuf,
}

/// CSV text of a curve. With `timing == false` the `mean_ms` column is
/// written as `NA` so identical inputs give identical bytes.
pub fn format_curve_csv(rows: &[CurveRow], timing: bool) -> String {
    let mut s = format!("{CURVE_HEADER}\n");
    for r in rows {
        let ms = match (timing, r.mean_ms) {
            (true, Some(v)) => v.to_string(),
            _ => "NA".to_string(),
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n, r.k, r.trials, r.successes, r.rate, r.mean_residual, ms
        )
        .unwrap();
    }
    s
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CURVE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {CURVE_HEADER:?}"),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 7 {
                return Err(err(format!("expected 7 fields, got {}", f.len())));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer {s:?}")));
            let float = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}")));
            Ok(CurveRow {
                n: int(f[0])?,
                k: int(f[1])?,
                trials: int(f[2])?,
                successes: int(f[3])?,
                rate: float(f[4])?,
                mean_residual: float(f[5])?,
                mean_ms: if f[6] == "NA" { None } else { Some(float(f[6])?) },
            })
        })
        .collect()
}

/// Gnuplot script drawing one success-rate curve per signal length.
pub fn plot_script(rows: &[CurveRow], csv_name: &str) -> String {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut s = String::new();
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set xlabel \"sparsity k\"\n");
    s.push_str("set ylabel \"success rate\"\n");
    s.push_str("set yrange [0:1.05]\n");
    s.push_str("set key bottom left\n");
    let curves: Vec<String> = ns
        .iter()
        .map(|n| format!("\"{csv_name}\" every ::1 using ($1 == {n} ? $2 : 1/0):5 with linespoints title \"n = {n}\""))
        .collect();
    writeln!(s, "plot {}", curves.join(", \\\n     ")).unwrap();
    s
}

/// Writes `curve.csv`, `curve.plot` and `manifest.json` into `dir`.
pub fn emit_report(rows: &[CurveRow], manifest: &Manifest, dir: &Path, timing: bool) -> Result<ReportFiles> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("no curve cells to report".into()));
    }
    std::fs::create_dir_all(dir)?;
    let files = ReportFiles {
        csv: dir.join("curve.csv"),
        plot: dir.join("curve.plot"),
        manifest: dir.join("manifest.json"),
    };
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Io(e.to_string()))?;
    write_atomic(&files.csv, format_curve_csv(rows, timing).as_bytes())?;
    write_atomic(&files.plot, plot_script(rows, "curve.csv").as_bytes())?;
    write_atomic(&files.manifest, format!("{json}\n").as_bytes())?;
    Ok(files)
}
