//! Fixed-column CSV tables and the fit document.
//!
//! Floats are written in shortest round-trip scientific notation, so a table
//! written by one subcommand reads back bit-for-bit in the next.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::analysis::FitResult;
use crate::machine::MeasurementRecord;
use crate::reduction::StressStrainPoint;

pub const MEASUREMENT_HEADER: [&str; 3] = ["machine_id", "dl_al_m", "dl_ac_m"];
pub const POINT_HEADER: [&str; 3] = ["machine_id", "strain", "stress_pa"];

/// A data row that could not be parsed; `line` is 1-based and counts the
/// header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub rows: Vec<T>,
    pub malformed: Vec<RowError>,
}

pub fn format_float(v: f64) -> String {
    format!("{v:e}")
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = [String; 3]>) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| IoError::file(path, e))?;
    w.write_record(header).map_err(|e| IoError::file(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| IoError::file(path, e))?;
    }
    w.flush().map_err(|e| IoError::file(path, e))
}

fn read_table(path: &Path, header: &[&str]) -> Result<Parsed<(String, f64, f64)>, IoError> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IoError::file(path, e))?;
    let found = r.headers().map_err(|e| IoError::file(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(IoError::Header {
            path: path.display().to_string(),
            expected: header.join(","),
        });
    }
    let mut out = Parsed {
        rows: Vec::new(),
        malformed: Vec::new(),
    };
    for (i, rec) in r.records().enumerate() {
        let line = rec
            .as_ref()
            .ok()
            .and_then(|r| r.position().map(|p| p.line()))
            .unwrap_or(i as u64 + 2);
        let parsed = rec.map_err(|e| e.to_string()).and_then(|rec| {
            if rec.len() != 3 {
                return Err(format!("expected 3 fields, found {}", rec.len()));
            }
            let num = |j: usize| -> Result<f64, String> {
                let v: f64 = rec[j]
                    .parse()
                    .map_err(|_| format!("`{}` is not a number in column {}", &rec[j], header[j]))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(format!("non-finite value in column {}", header[j]))
                }
            };
            if rec[0].is_empty() {
                return Err("empty machine_id".into());
            }
            Ok((rec[0].to_string(), num(1)?, num(2)?))
        });
        match parsed {
            Ok(row) => out.rows.push(row),
            Err(message) => out.malformed.push(RowError { line, message }),
        }
    }
    Ok(out)
}

pub fn write_measurements(path: &Path, records: &[MeasurementRecord]) -> Result<(), IoError> {
    write_table(
        path,
        &MEASUREMENT_HEADER,
        records
            .iter()
            .map(|r| [r.machine_id.clone(), format_float(r.dl_al), format_float(r.dl_ac)]),
    )
}

pub fn read_measurements(path: &Path) -> Result<Parsed<MeasurementRecord>, IoError> {
    let t = read_table(path, &MEASUREMENT_HEADER)?;
    Ok(Parsed {
        rows: t
            .rows
            .into_iter()
            .map(|(machine_id, dl_al, dl_ac)| MeasurementRecord {
                machine_id,
                dl_al,
                dl_ac,
                noise_seed: None,
            })
            .collect(),
        malformed: t.malformed,
    })
}

pub fn write_points(path: &Path, points: &[StressStrainPoint]) -> Result<(), IoError> {
    write_table(
        path,
        &POINT_HEADER,
        points
            .iter()
            .map(|p| [p.machine_id.clone(), format_float(p.strain), format_float(p.stress)]),
    )
}

pub fn read_points(path: &Path) -> Result<Parsed<StressStrainPoint>, IoError> {
    let t = read_table(path, &POINT_HEADER)?;
    Ok(Parsed {
        rows: t
            .rows
            .into_iter()
            .map(|(machine_id, strain, stress)| StressStrainPoint {
                machine_id,
                strain,
                stress,
            })
            .collect(),
        malformed: t.malformed,
    })
}

/// Output of the `fit` subcommand, input of `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub label: String,
    pub material: String,
    /// Specimen film thickness (m).
    pub thickness: f64,
    pub plastic_threshold: f64,
    #[serde(rename = "yield")]
    pub yield_fit: FitResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardening: Option<FitResult>,
    pub points: Vec<StressStrainPoint>,
}
