//! Summary JSON and sweep tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::value::RawValue;

use ptcd_core::counterdiabatic::CdMode;
use ptcd_core::paths::Direction;
use ptcd_core::table::{format_float, write_records};

use crate::error::Result;

pub const SUMMARY_KEYS: [&str; 7] = ["T", "direction", "cdMode", "Dbar", "xT", "enclosedEPs", "maxA"];
pub const PERIOD_SWEEP_HEADER: [&str; 5] = ["T", "direction", "cdMode", "Dbar", "maxA"];
pub const TOPOLOGY_HEADER: [&str; 4] = ["jMin", "xT_cd", "xT_nocd", "enclosedEPs"];

/// One loop's headline numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub period: f64,
    pub direction: Option<Direction>,
    pub cd_mode: CdMode,
    pub dbar: f64,
    pub x_t: f64,
    pub enclosed_eps: Option<usize>,
    pub max_a: f64,
}

#[derive(Serialize)]
struct SummaryJson {
    #[serde(rename = "T")]
    period: Box<RawValue>,
    direction: Option<&'static str>,
    #[serde(rename = "cdMode")]
    cd_mode: &'static str,
    #[serde(rename = "Dbar")]
    dbar: Box<RawValue>,
    #[serde(rename = "xT")]
    x_t: Box<RawValue>,
    #[serde(rename = "enclosedEPs")]
    enclosed_eps: Option<usize>,
    #[serde(rename = "maxA")]
    max_a: Box<RawValue>,
}

/// A float as a JSON number with 17 significant digits; non-finite → null.
fn number(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format_float(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn summary_json(rows: &[RunSummary]) -> String {
    let out: Vec<SummaryJson> = rows
        .iter()
        .map(|r| SummaryJson {
            period: number(r.period),
            direction: r.direction.map(|d| d.as_str()),
            cd_mode: r.cd_mode.as_str(),
            dbar: number(r.dbar),
            x_t: number(r.x_t),
            enclosed_eps: r.enclosed_eps,
            max_a: number(r.max_a),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&out).expect("summary serializes");
    s.push('\n');
    s
}

pub fn write_summary(path: &Path, rows: &[RunSummary]) -> Result<PathBuf> {
    std::fs::write(path, summary_json(rows))?;
    Ok(path.to_path_buf())
}

/// `T,direction,cdMode,Dbar,maxA`
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRow {
    pub period: f64,
    pub direction: Direction,
    pub cd_mode: CdMode,
    pub dbar: f64,
    pub max_a: f64,
}

/// `jMin,xT_cd,xT_nocd,enclosedEPs`; `None` where the loop touches an EP.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyRow {
    pub j_min: f64,
    pub x_t_cd: f64,
    pub x_t_nocd: f64,
    pub enclosed_eps: Option<usize>,
}

pub fn write_period_sweep(path: &Path, rows: &[PeriodRow]) -> Result<PathBuf> {
    let records = rows.iter().map(|r| {
        vec![
            format_float(r.period),
            r.direction.as_str().to_string(),
            r.cd_mode.as_str().to_string(),
            format_float(r.dbar),
            format_float(r.max_a),
        ]
    });
    write_records(create(path)?, &PERIOD_SWEEP_HEADER, records)?;
    Ok(path.to_path_buf())
}

pub fn write_topology(path: &Path, rows: &[TopologyRow]) -> Result<PathBuf> {
    let records = rows.iter().map(|r| {
        vec![
            format_float(r.j_min),
            format_float(r.x_t_cd),
            format_float(r.x_t_nocd),
            r.enclosed_eps.map_or_else(|| "NaN".to_string(), |n| n.to_string()),
        ]
    });
    write_records(create(path)?, &TOPOLOGY_HEADER, records)?;
    Ok(path.to_path_buf())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Write through `f` into a new file and return its path.
pub fn write_with<F>(path: PathBuf, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = create(&path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(path)
}
