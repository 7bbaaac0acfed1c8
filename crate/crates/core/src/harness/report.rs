use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Format, HarnessError};

/// Column order of ladder CSV files.
pub const CSV_HEADER: [&str; 9] =
    ["V", "lhs", "main", "secondary", "ratio", "case_I", "case_II", "case_III", "case_IV"];

/// Outcome of one theorem run. `lhs` is the sum of `per_case` in case order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Ratios are only comparable at equal w.
    pub w: u64,
    pub volume: f64,
    pub lhs: f64,
    pub main_term: f64,
    pub secondary_term: f64,
    pub ratio: f64,
    pub per_case: [f64; 4],
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    /// Wall time in seconds; absent unless timing was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime: Option<f64>,
}

impl Report {
    fn csv_row(&self) -> [String; 9] {
        // Debug keeps round-trip precision and switches to exponents
        let num = |x: f64| format!("{x:?}");
        let [c1, c2, c3, c4] = self.per_case.map(num);
        [
            num(self.volume),
            num(self.lhs),
            num(self.main_term),
            num(self.secondary_term),
            num(self.ratio),
            c1,
            c2,
            c3,
            c4,
        ]
    }
}

fn io_err<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Io(e.to_string())
}

/// Serializes reports: one JSON object (an array for several reports) or
/// CSV with one row per report.
pub fn emit<W: Write>(reports: &[Report], format: Format, mut out: W) -> Result<(), HarnessError> {
    match format {
        Format::Json => {
            match reports {
                [one] => serde_json::to_writer_pretty(&mut out, one),
                many => serde_json::to_writer_pretty(&mut out, many),
            }
            .map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER).map_err(io_err)?;
            for r in reports {
                w.write_record(r.csv_row()).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

/// CSV of a ladder, one row per volume.
pub fn emit_ladder<W: Write>(reports: &[Report], out: W) -> Result<(), HarnessError> {
    emit(reports, Format::Csv, out)
}

pub fn write_report(reports: &[Report], format: Format, path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut buf = std::io::BufWriter::new(file);
    emit(reports, format, &mut buf)?;
    buf.flush().map_err(io_err)
}
