//! Adiabaticity parameter with the gain/loss exponent,
//!
//! ```text
//! a_nm(t) = |⟨L_n|∂_t R_m⟩| / |λ_n − λ_m| · exp(−I_nm(t)),
//! I_nm(t) = Im ∫₀ᵗ (λ_m − λ_n) dt′
//! ```

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::counterdiabatic::connection_matrix;
use crate::error::{Error, Result};
use crate::paths::{tracked_angle, ControlSchedule, Direction, PathPoint};
use crate::spectrum::eigensystem;
use crate::table::{format_float, write_records, write_rows};

/// Smallest gap `|λ₊ − λ₋|` accepted, rad/μs.
pub const MIN_GAP: f64 = 1e-9;

/// Breakdown windows closer than this fraction of the path duration are
/// merged (one interval of the 51-point reporting grid).
pub const WINDOW_MERGE_FRACTION: f64 = 1.0 / 50.0;

/// Ordered eigenstate pair `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    /// `(+, −)`: leakage out of `R₋` into `R₊`.
    PlusMinus,
    /// `(−, +)`.
    MinusPlus,
}

impl Pair {
    /// The pair relevant for a state prepared in `R±`.
    pub fn for_initial(plus: bool) -> Pair {
        if plus {
            Pair::MinusPlus
        } else {
            Pair::PlusMinus
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pair::PlusMinus => "pm",
            Pair::MinusPlus => "mp",
        })
    }
}

impl FromStr for Pair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" | "+-" => Ok(Pair::PlusMinus),
            "mp" | "-+" => Ok(Pair::MinusPlus),
            other => Err(Error::InvalidArgument(format!("unknown pair '{other}'"))),
        }
    }
}

/// `a_nm(t)` for both pairs along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityReport {
    pub times: Vec<f64>,
    pub a_pm: Vec<f64>,
    pub a_mp: Vec<f64>,
    /// `I_{+−}(t)`; `I_{−+} = −I_{+−}`.
    pub i_pm: Vec<f64>,
    /// First factor `|⟨L_n|∂_t R_m⟩|/|λ_n − λ_m|` for the selected pair.
    pub gap_factor: Vec<f64>,
    pub pair: Pair,
    /// Maximum of the selected pair over the grid.
    pub max_a: f64,
    /// Intervals where the selected pair exceeds 1, with edges located by
    /// linear interpolation and nearby windows merged.
    pub breakdown_windows: Vec<(f64, f64)>,
    /// `Im λ₊ − Im λ₋` changes sign somewhere on the path, outside the
    /// regime where the exponent's derivation applies.
    pub imaginary_crossing: bool,
}

pub const REPORT_HEADER: [&str; 4] = ["t", "a_pm", "a_mp", "I_pm"];
pub const SWEEP_HEADER: [&str; 3] = ["T", "direction", "maxA"];

impl AdiabaticityReport {
    pub fn values(&self, pair: Pair) -> &[f64] {
        match pair {
            Pair::PlusMinus => &self.a_pm,
            Pair::MinusPlus => &self.a_mp,
        }
    }

    /// `I_nm(t)` for the requested pair.
    pub fn exponent(&self, pair: Pair) -> Vec<f64> {
        match pair {
            Pair::PlusMinus => self.i_pm.clone(),
            Pair::MinusPlus => self.i_pm.iter().map(|v| -v).collect(),
        }
    }

    /// `t,a_pm,a_mp,I_pm`
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let rows = (0..self.times.len()).map(|k| vec![self.times[k], self.a_pm[k], self.a_mp[k], self.i_pm[k]]);
        write_rows(writer, &REPORT_HEADER, rows)
    }
}

/// Evaluate `a_nm(t)` on the path grid; `I_nm` by the trapezoid rule.
pub fn adiabaticity_parameter(path: &[PathPoint], pair: Pair) -> Result<AdiabaticityReport> {
    if path.is_empty() {
        return Err(Error::InvalidArgument("empty path".into()));
    }
    let n = path.len();
    let mut times = Vec::with_capacity(n);
    let mut a_pm = Vec::with_capacity(n);
    let mut a_mp = Vec::with_capacity(n);
    let mut i_pm = Vec::with_capacity(n);
    let mut gap_factor = Vec::with_capacity(n);
    let mut exponent = 0.0;
    let mut prev_split: Option<(f64, f64)> = None;
    let mut imaginary_crossing = false;

    for p in path {
        let eig = eigensystem(&p.params, &p.alpha)?;
        let split = eig.lambda_plus - eig.lambda_minus;
        let gap = split.norm();
        if gap < MIN_GAP {
            return Err(Error::DegenerateGap { t: p.t, gap });
        }
        if let Some((t_prev, im_prev)) = prev_split {
            // Im(λ₋ − λ₊) integrated for I_{+−}
            exponent -= 0.5 * (p.t - t_prev) * (im_prev + split.im);
            if im_prev * split.im < 0.0 {
                imaginary_crossing = true;
            }
        }
        prev_split = Some((p.t, split.im));

        let m = connection_matrix(p);
        let f_pm = m[0][1].norm() / gap;
        let f_mp = m[1][0].norm() / gap;
        times.push(p.t);
        a_pm.push(f_pm * (-exponent).exp());
        a_mp.push(f_mp * exponent.exp());
        i_pm.push(exponent);
        gap_factor.push(match pair {
            Pair::PlusMinus => f_pm,
            Pair::MinusPlus => f_mp,
        });
    }

    let selected = match pair {
        Pair::PlusMinus => &a_pm,
        Pair::MinusPlus => &a_mp,
    };
    let max_a = selected.iter().cloned().fold(0.0, f64::max);
    let duration = times[n - 1] - times[0];
    let breakdown_windows = merge_windows(threshold_windows(&times, selected, 1.0), WINDOW_MERGE_FRACTION * duration);
    Ok(AdiabaticityReport { times, a_pm, a_mp, i_pm, gap_factor, pair, max_a, breakdown_windows, imaginary_crossing })
}

/// Intervals where `values > level`, edges linearly interpolated.
fn threshold_windows(times: &[f64], values: &[f64], level: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for k in 0..times.len() {
        let above = values[k] > level;
        let crossing = |k: usize| {
            let (t0, t1, v0, v1) = (times[k - 1], times[k], values[k - 1], values[k]);
            t0 + (level - v0) / (v1 - v0) * (t1 - t0)
        };
        match (start, above) {
            (None, true) => start = Some(if k == 0 { times[0] } else { crossing(k) }),
            (Some(s), false) => {
                out.push((s, crossing(k)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, *times.last().unwrap()));
    }
    out
}

fn merge_windows(windows: Vec<(f64, f64)>, max_gap: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    for w in windows {
        match out.last_mut() {
            Some(last) if w.0 - last.1 < max_gap => last.1 = w.1,
            _ => out.push(w),
        }
    }
    out
}

/// One `(T, direction)` entry of a period sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub period: f64,
    pub direction: Direction,
    pub max_a: f64,
}

/// `max_t a_nm` for every `(T, direction)`, evaluated in parallel.
/// Rows come back ordered by period, then by the order of `directions`.
pub fn sweep_max_a<F>(family: F, periods: &[f64], directions: &[Direction], pair: Pair) -> Result<Vec<SweepRow>>
where
    F: Fn(f64, Direction) -> Result<ControlSchedule> + Sync,
{
    let jobs: Vec<(f64, Direction)> = periods.iter().flat_map(|&t| directions.iter().map(move |&d| (t, d))).collect();
    jobs.par_iter()
        .map(|&(period, direction)| {
            let schedule = family(period, direction)?;
            let report = adiabaticity_parameter(&tracked_angle(&schedule)?, pair)?;
            Ok(SweepRow { period, direction, max_a: report.max_a })
        })
        .collect()
}

/// `T,direction,maxA`
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> std::io::Result<()> {
    write_records(
        writer,
        &SWEEP_HEADER,
        rows.iter().map(|r| vec![format_float(r.period), r.direction.to_string(), format_float(r.max_a)]),
    )
}
