//! Sweep rows and their CSV / JSON serializations.
//!
//! The CSV schema is fixed: `axis, axis_value, scheme, method, probability,
//! stderr, regime_table, regime_column, flags`.  Floats are written in
//! shortest round-trip form, so the JSON mirror carries exactly the same
//! numbers.

use serde::{Deserialize, Serialize};
use std::io::Write;

pub const CSV_HEADER: &str =
    "axis,axis_value,scheme,method,probability,stderr,regime_table,regime_column,flags";

/// One (grid point, scheme, method) record of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub axis_value: f64,
    pub scheme: String,
    pub method: String,
    pub probability: Option<f64>,
    pub stderr: Option<f64>,
    pub regime_table: String,
    pub regime_column: Option<u32>,
    pub flags: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    // Debug formatting round-trips exactly, unlike LowerExp
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{:?},{},{},{},{},{},{},{}",
            r.axis,
            r.axis_value,
            r.scheme,
            r.method,
            fmt_opt(r.probability),
            fmt_opt(r.stderr),
            r.regime_table,
            r.regime_column.map(|c| c.to_string()).unwrap_or_default(),
            r.flags
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(w: W, rows: &[SweepRow]) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(w, rows)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_rows(
    rows: &[SweepRow],
    format: OutputFormat,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            let file = std::fs::File::create(path)?;
            match format {
                OutputFormat::Csv => write_csv(file, rows)?,
                OutputFormat::Json => write_json(file, rows)?,
            }
        }
        None => {
            let stdout = std::io::stdout().lock();
            match format {
                OutputFormat::Csv => write_csv(stdout, rows)?,
                OutputFormat::Json => write_json(stdout, rows)?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_through_json() {
        let rows = vec![SweepRow {
            axis: "snr_db".into(),
            axis_value: 12.5,
            scheme: "hsic".into(),
            method: "closed_form".into(),
            probability: Some(1.234567890123e-7),
            stderr: Some(0.0),
            regime_table: "II".into(),
            regime_column: Some(1),
            flags: String::new(),
        }];
        let mut json = Vec::new();
        write_json(&mut json, &rows).unwrap();
        let back: Vec<SweepRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, rows);
        let mut csv = Vec::new();
        write_csv(&mut csv, &back).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1.234567890123e-7);
    }
}
