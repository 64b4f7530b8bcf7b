//! Minimal CSV emission and parsing for the command outputs.
//!
//! Every emitted file starts with a `# config_hash=...` provenance comment
//! followed by a header row. Values never contain commas or quotes, so no
//! quoting layer is needed.

use crate::error::{Error, Result};
use std::path::Path;

pub fn write_csv(
    path: &Path,
    config_hash: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={config_hash}\n"));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch {
                expected: header.len(),
                got: row.len(),
            });
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Parsed CSV: (header, rows). Comment lines are skipped.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(Error::MalformedData(format!(
                        "csv row width {} does not match header width {} in {}",
                        fields.len(),
                        h.len(),
                        path.display()
                    )));
                }
                rows.push(fields);
            }
        }
    }
    let header = header.ok_or_else(|| Error::MalformedData("csv file has no header".into()))?;
    Ok((header, rows))
}

/// Shortest round-trip decimal form, stable across runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::MalformedData(format!("not a number: {s}")))
}
