//! CSV tables of numbers with a header row.
//!
//! Trajectories and spectra are written with the shortest representation
//! that reads back to the same `f64`; density tables use six significant
//! digits.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

/// Shortest round-trip representation.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:?}")
}

/// Six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// Header `prefix_1, ..., prefix_count`.
pub fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}_{i}")).collect()
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `step`-keyed rows of full-precision values; the `step` column is
/// written as an integer.
pub fn write_numeric(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let keyed = header.first().is_some_and(|h| h == "step");
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .enumerate()
                .map(|(j, x)| {
                    if j == 0 && keyed && x >= 0.0 && x.fract() == 0.0 {
                        format!("{}", x as u64)
                    } else {
                        fmt_exact(x)
                    }
                })
                .collect()
        })
        .collect();
    write_table(path, header, &rows)
}

pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::format(path, format!("row {}: not a number: {f:?}", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(Error::format(
                path,
                format!("row {} has {} fields", line + 1, row.len()),
            ));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
