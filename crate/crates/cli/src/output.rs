use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::Result;

/// Header of every sweep CSV.
pub const SWEEP_HEADER: [&str; 6] = ["snr_db", "series", "value", "ci_low", "ci_high", "trials"];

/// One row of a sweep CSV. Analytic series carry no interval or trial
/// count; those fields are left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub snr_db: f64,
    pub value: f64,
    pub ci: Option<(f64, f64)>,
    pub trials: Option<u64>,
}

/// A named data series destined for its own CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub rows: Vec<SeriesRow>,
}

impl Series {
    pub fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let (lo, hi) = match r.ci {
                    Some((lo, hi)) => (lo.to_string(), hi.to_string()),
                    None => (String::new(), String::new()),
                };
                vec![
                    r.snr_db.to_string(),
                    self.name.clone(),
                    r.value.to_string(),
                    lo,
                    hi,
                    r.trials.map(|t| t.to_string()).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// `# ofdm-snm <command> key=value ... generated_unix=<secs>`.
pub fn metadata_line(command: &str, params: &[(&str, String)]) -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut line = format!("# ofdm-snm {command}");
    for (k, v) in params {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" generated_unix={secs}"));
    line
}

/// Writes an optional metadata comment followed by a CSV table.
pub fn write_table<W: Write>(
    out: W,
    metadata: Option<&str>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = out;
    if let Some(line) = metadata {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(
    path: Option<&Path>,
    metadata: Option<&str>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    match path {
        Some(p) => write_table(BufWriter::new(File::create(p)?), metadata, header, rows),
        None => write_table(io::stdout().lock(), metadata, header, rows),
    }
}
