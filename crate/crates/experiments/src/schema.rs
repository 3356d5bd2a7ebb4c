//! Header and value checks for every file the runners emit.

use std::path::{Path, PathBuf};

use ptcd_core::adiabaticity::{REPORT_HEADER, SWEEP_HEADER};
use ptcd_core::counterdiabatic::{CdMode, DRIVE_HEADER};
use ptcd_core::paths::Direction;
use ptcd_core::propagator::TRAJECTORY_HEADER;

use crate::error::{Result, RunError};
use crate::output::{PERIOD_SWEEP_HEADER, SUMMARY_KEYS, TOPOLOGY_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    /// Finite float, nondecreasing down the file.
    Time,
    /// Finite float.
    Finite,
    /// Float, NaN allowed.
    Float,
    DirectionLabel,
    ModeLabel,
    /// 0, 1, 2 or NaN.
    EpCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Csv(&'static [&'static str], &'static [Column]),
    Summary,
}

use Column::*;

const TRAJECTORY_COLS: [Column; 9] = [Time, Finite, Finite, Finite, Float, Float, Float, Finite, Float];
const DRIVE_COLS: [Column; 4] = [Time, Finite, Finite, Finite];
const REPORT_COLS: [Column; 4] = [Time, Float, Float, Float];
const SWEEP_COLS: [Column; 3] = [Finite, DirectionLabel, Float];
const PERIOD_COLS: [Column; 5] = [Finite, DirectionLabel, ModeLabel, Finite, Float];
const TOPOLOGY_COLS: [Column; 4] = [Time, Float, Float, EpCount];

/// Schema by file name, `None` for files the runners never write.
pub fn schema_for(name: &str) -> Option<Schema> {
    let csv = name.strip_suffix(".csv");
    match (csv, name) {
        (_, n) if n.starts_with("summary") && n.ends_with(".json") => Some(Schema::Summary),
        (Some("adiabaticity_sweep"), _) => Some(Schema::Csv(&SWEEP_HEADER, &SWEEP_COLS)),
        (Some("period_sweep"), _) => Some(Schema::Csv(&PERIOD_SWEEP_HEADER, &PERIOD_COLS)),
        (Some("topology_scan"), _) => Some(Schema::Csv(&TOPOLOGY_HEADER, &TOPOLOGY_COLS)),
        (Some(s), _) if s.starts_with("trajectory_") || s.starts_with("deviation_") => {
            Some(Schema::Csv(&TRAJECTORY_HEADER, &TRAJECTORY_COLS))
        }
        (Some(s), _) if s.starts_with("drive_") => Some(Schema::Csv(&DRIVE_HEADER, &DRIVE_COLS)),
        (Some(s), _) if s.starts_with("adiabaticity_") => Some(Schema::Csv(&REPORT_HEADER, &REPORT_COLS)),
        _ => None,
    }
}

fn violation(file: &Path, reason: impl Into<String>) -> RunError {
    RunError::Schema { file: file.display().to_string(), reason: reason.into() }
}

/// Validate one file; returns the number of data rows (or summary entries).
pub fn validate_file(path: &Path) -> Result<usize> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    match schema_for(name) {
        Some(Schema::Csv(header, cols)) => validate_csv(path, header, cols),
        Some(Schema::Summary) => validate_summary(path),
        None => Err(violation(path, "no schema for this file name")),
    }
}

/// Validate every file in `dir`, in name order.
pub fn validate_dir(dir: &Path) -> Result<Vec<(PathBuf, usize)>> {
    let mut paths: Vec<PathBuf> =
        std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    paths.sort();
    paths.into_iter().map(|p| validate_file(&p).map(|n| (p, n))).collect()
}

fn validate_csv(path: &Path, header: &[&str], cols: &[Column]) -> Result<usize> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| violation(path, e.to_string()))?;
    let got = reader.headers().map_err(|e| violation(path, e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(violation(path, format!("header {:?}, expected {:?}", got.iter().collect::<Vec<_>>(), header)));
    }
    let mut rows = 0;
    let mut last_time = f64::NEG_INFINITY;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| violation(path, e.to_string()))?;
        let at = |c: &str, why: &str| violation(path, format!("row {}, column {c}: {why}", line + 1));
        for ((field, col), name) in record.iter().zip(cols).zip(header) {
            match col {
                DirectionLabel => {
                    field.parse::<Direction>().map_err(|_| at(name, "bad direction"))?;
                }
                ModeLabel => {
                    field.parse::<CdMode>().map_err(|_| at(name, "bad cd mode"))?;
                }
                EpCount => {
                    if !matches!(field, "0" | "1" | "2" | "NaN") {
                        return Err(at(name, "expected 0, 1, 2 or NaN"));
                    }
                }
                Time | Finite | Float => {
                    let v: f64 = field.parse().map_err(|_| at(name, "not a number"))?;
                    if *col != Float && !v.is_finite() {
                        return Err(at(name, "not finite"));
                    }
                    if *col == Time {
                        if v < last_time {
                            return Err(at(name, "decreasing"));
                        }
                        last_time = v;
                    }
                }
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(violation(path, "no data rows"));
    }
    Ok(rows)
}

fn validate_summary(path: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| violation(path, e.to_string()))?;
    let entries = v.as_array().ok_or_else(|| violation(path, "expected an array"))?;
    if entries.is_empty() {
        return Err(violation(path, "empty summary"));
    }
    for (k, e) in entries.iter().enumerate() {
        let obj = e.as_object().ok_or_else(|| violation(path, format!("entry {k} is not an object")))?;
        let bad = |key: &str| violation(path, format!("entry {k}, key {key}"));
        if obj.len() != SUMMARY_KEYS.len() || !SUMMARY_KEYS.iter().all(|key| obj.contains_key(*key)) {
            return Err(violation(path, format!("entry {k} keys {:?}", obj.keys().collect::<Vec<_>>())));
        }
        let num = |key: &str| obj[key].as_f64().ok_or_else(|| bad(key));
        if num("T")? <= 0.0 {
            return Err(bad("T"));
        }
        if !(0.0..=1.0 + 1e-12).contains(&num("Dbar")?) {
            return Err(bad("Dbar"));
        }
        if !obj["xT"].is_null() && num("xT")?.abs() > 1.0 + 1e-12 {
            return Err(bad("xT"));
        }
        if num("maxA")? < 0.0 {
            return Err(bad("maxA"));
        }
        match &obj["direction"] {
            serde_json::Value::Null => {}
            serde_json::Value::String(s) if s.parse::<Direction>().is_ok() => {}
            _ => return Err(bad("direction")),
        }
        match obj["cdMode"].as_str().map(str::parse::<CdMode>) {
            Some(Ok(_)) => {}
            _ => return Err(bad("cdMode")),
        }
        match &obj["enclosedEPs"] {
            serde_json::Value::Null => {}
            n if matches!(n.as_u64(), Some(0..=2)) => {}
            _ => return Err(bad("enclosedEPs")),
        }
    }
    Ok(entries.len())
}
