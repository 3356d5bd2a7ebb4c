//! The five figure-level experiments. Each writes its files into `out` and
//! returns their paths in a fixed order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use ptcd_core::adiabaticity::{adiabaticity_parameter, sweep_max_a, write_sweep_csv, Pair};
use ptcd_core::counterdiabatic::{cd_exact, cd_hermitian_approx, drive_matrix, CdMode};
use ptcd_core::metrics::summarize_loop;
use ptcd_core::paths::{enclosed_ep_count, track_on_grid, tracked_angle, ControlSchedule, Direction};
use ptcd_core::propagator::{evolve, evolve_with_cd, InitialState, Trajectory, DEFAULT_STEPS};
use ptcd_core::spectrum::build_hamiltonian;
use ptcd_core::Vec2;

use crate::config::{lin_space, ExperimentKind, Settings};
use crate::error::{Result, RunError};
use crate::output::{
    write_period_sweep, write_summary, write_topology, write_with, PeriodRow, RunSummary, TopologyRow,
};

/// Largest `dt·‖H‖_F` the runners aim for; half the integrator's hard limit.
pub const TARGET_STEP_PRODUCT: f64 = 0.05;

/// `|x−⟩`, the initial state of the topology scan.
const X_MINUS: Vec2 = Vec2::new(
    ptcd_core::C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ptcd_core::C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
);

/// Samples used to bound `‖H‖` along a loop before choosing `dt`.
const NORM_PROBE_SAMPLES: usize = 20_001;

pub fn run(settings: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    match settings.experiment {
        ExperimentKind::AdiabaticitySweep => run_adiabaticity_sweep(settings, out),
        ExperimentKind::Encircle => run_encircle(settings, out),
        ExperimentKind::PeriodSweep => run_period_sweep(settings, out),
        ExperimentKind::ApolloniusDeviation => run_apollonius_deviation(settings, out),
        ExperimentKind::TopologyScan => run_topology_scan(settings, out),
    }
}

fn schedule_err(e: ptcd_core::Error) -> RunError {
    match e {
        ptcd_core::Error::InvalidArgument(m) => RunError::config("schedule", m),
        other => RunError::Numerical(other),
    }
}

fn cosine_loop(s: &Settings, j_min: f64, direction: Direction, period: f64) -> Result<ControlSchedule> {
    ControlSchedule::cosine_loop(j_min, s.j_max, s.signed_amp(direction), period, s.kappa)
        .and_then(|c| c.with_samples(s.samples))
        .map_err(schedule_err)
}

/// Step size for one run: the configured `dt` (or `T/DEFAULT_STEPS`),
/// shrunk so `dt·max‖H_eff + drive‖_F` stays below [`TARGET_STEP_PRODUCT`].
pub fn step_size(schedule: &ControlSchedule, mode: CdMode, clamp: Option<f64>, dt: Option<f64>) -> Result<f64> {
    let base = dt.unwrap_or(schedule.period / DEFAULT_STEPS as f64);
    let times = lin_space(0.0, schedule.period, NORM_PROBE_SAMPLES);
    let mut max_norm = 0.0f64;
    if mode == CdMode::None {
        for &t in &times {
            max_norm = max_norm.max(build_hamiltonian(&schedule.params_at(t)?).frobenius());
        }
    } else {
        for p in &track_on_grid(schedule, &times, None)? {
            let drive = drive_matrix(mode, p);
            let drive = clamp.map_or(drive, |c| drive.clamp_entries(c));
            max_norm = max_norm.max((build_hamiltonian(&p.params) + drive).frobenius());
        }
    }
    Ok(if max_norm > 0.0 { base.min(TARGET_STEP_PRODUCT / max_norm) } else { base })
}

fn max_a(schedule: &ControlSchedule) -> Result<f64> {
    Ok(adiabaticity_parameter(&tracked_angle(schedule)?, Pair::PlusMinus)?.max_a)
}

/// Propagate from `|R−(0)⟩` and summarize.
pub fn run_loop(s: &Settings, schedule: &ControlSchedule, mode: CdMode) -> Result<(Trajectory, RunSummary)> {
    let dt = step_size(schedule, mode, s.clamp, s.dt)?;
    let traj = evolve_with_cd(schedule, mode, InitialState::Minus, dt, s.clamp)?;
    let summary = summarize_loop(&traj, schedule)?;
    let row = RunSummary {
        period: schedule.period,
        direction: schedule.direction(),
        cd_mode: mode,
        dbar: summary.avg_trace_distance,
        x_t: summary.x_t,
        enclosed_eps: Some(summary.enclosed_eps),
        max_a: max_a(schedule)?,
    };
    Ok((traj, row))
}

fn write_drive(path: PathBuf, schedule: &ControlSchedule, mode: CdMode) -> Result<PathBuf> {
    let exact = cd_exact(&tracked_angle(schedule)?);
    let drive = match mode {
        CdMode::HermitianOnly => cd_hermitian_approx(&exact),
        _ => exact,
    };
    write_with(path, |w| drive.write_csv(w))
}

pub fn run_adiabaticity_sweep(s: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for &dir in &s.directions {
        let schedule = cosine_loop(s, s.j_min, dir, s.period)?;
        let report = adiabaticity_parameter(&tracked_angle(&schedule)?, Pair::PlusMinus)?;
        files.push(write_with(out.join(format!("adiabaticity_{dir}.csv")), |w| report.write_csv(w))?);
    }
    // validate every period up front so sweep failures are numerical only
    for &t in &s.periods {
        cosine_loop(s, s.j_min, s.directions[0], t)?;
    }
    let rows = sweep_max_a(
        |t, d| ControlSchedule::cosine_loop(s.j_min, s.j_max, s.signed_amp(d), t, s.kappa),
        &s.periods,
        &s.directions,
        Pair::PlusMinus,
    )?;
    files.push(write_with(out.join("adiabaticity_sweep.csv"), |w| write_sweep_csv(&rows, w))?);
    Ok(files)
}

pub fn run_encircle(s: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    let jobs: Vec<(Direction, CdMode)> =
        s.directions.iter().flat_map(|&d| s.cd_modes.iter().map(move |&m| (d, m))).collect();
    let schedules =
        s.directions.iter().map(|&d| Ok((d, cosine_loop(s, s.j_min, d, s.period)?))).collect::<Result<Vec<_>>>()?;
    let schedule_for = |d: Direction| &schedules.iter().find(|(x, _)| *x == d).unwrap().1;

    let results = jobs.par_iter().map(|&(d, m)| run_loop(s, schedule_for(d), m)).collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    let mut summaries = Vec::new();
    for (&(d, m), (traj, row)) in jobs.iter().zip(&results) {
        files.push(write_with(out.join(format!("trajectory_{d}_{m}.csv")), |w| traj.write_csv(w))?);
        if m != CdMode::None {
            files.push(write_drive(out.join(format!("drive_{d}_{m}.csv")), schedule_for(d), m)?);
        }
        summaries.push(row.clone());
    }
    for (d, schedule) in &schedules {
        let report = adiabaticity_parameter(&tracked_angle(schedule)?, Pair::PlusMinus)?;
        files.push(write_with(out.join(format!("adiabaticity_{d}.csv")), |w| report.write_csv(w))?);
    }
    files.push(write_summary(&out.join("summary.json"), &summaries)?);
    Ok(files)
}

pub fn run_period_sweep(s: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    let mut jobs = Vec::new();
    for &t in &s.periods {
        for &d in &s.directions {
            let schedule = cosine_loop(s, s.j_min, d, t)?;
            for &m in &s.cd_modes {
                jobs.push((schedule.clone(), d, m));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|(schedule, d, m)| {
            let (_, r) = run_loop(s, schedule, *m)?;
            Ok(PeriodRow { period: schedule.period, direction: *d, cd_mode: *m, dbar: r.dbar, max_a: r.max_a })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![write_period_sweep(&out.join("period_sweep.csv"), &rows)?])
}

fn is_ep_contact(e: &RunError) -> bool {
    use ptcd_core::Error::*;
    matches!(e, RunError::Numerical(PathTooCloseToEp { .. } | AtExceptionalPoint { .. } | DegenerateGap { .. }))
}

/// x-component of the final state starting from `|x−⟩`.
///
/// Without a drive no eigenstate reference is needed, so loops through an
/// EP still integrate.
pub fn final_x(s: &Settings, schedule: &ControlSchedule, mode: CdMode) -> Result<f64> {
    let dt = step_size(schedule, mode, s.clamp, s.dt)?;
    let traj = if mode == CdMode::None {
        let h = |t: f64| Ok(build_hamiltonian(&schedule.params_at(t)?));
        evolve(h, X_MINUS, schedule.period, dt, None)?
    } else {
        evolve_with_cd(schedule, mode, InitialState::Custom(X_MINUS), dt, s.clamp)?
    };
    Ok(traj.pauli.last().unwrap()[0])
}

pub fn topology_row(s: &Settings, j_min: f64) -> Result<TopologyRow> {
    let dir = s.directions[0];
    let mode = s.cd_modes[0];
    let schedule = cosine_loop(s, j_min, dir, s.period)?;
    let or_nan = |r: Result<f64>| match r {
        Err(e) if is_ep_contact(&e) => Ok(f64::NAN),
        other => other,
    };
    let enclosed = match enclosed_ep_count(&schedule).map_err(RunError::from) {
        Ok(n) => Some(n),
        Err(e) if is_ep_contact(&e) => None,
        Err(e) => return Err(e),
    };
    let x_t_cd = match enclosed {
        Some(_) => or_nan(final_x(s, &schedule, mode))?,
        None => f64::NAN,
    };
    let x_t_nocd = or_nan(final_x(s, &schedule, CdMode::None))?;
    Ok(TopologyRow { j_min, x_t_cd, x_t_nocd, enclosed_eps: enclosed })
}

pub fn run_topology_scan(s: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    let rows = s.j_min_values.par_iter().map(|&j| topology_row(s, j)).collect::<Result<Vec<_>>>()?;
    Ok(vec![write_topology(&out.join("topology_scan.csv"), &rows)?])
}

/// The near-Apollonius circle and the deviating ellipse, in that order.
pub fn apollonius_paths(s: &Settings) -> Result<[(&'static str, ControlSchedule); 2]> {
    let dir = s.directions[0];
    let mut circle = ControlSchedule::apollonius(s.ratio, s.kappa, s.period)
        .and_then(|c| c.with_samples(s.samples))
        .map_err(schedule_err)?;
    if circle.direction() != Some(dir) {
        circle = circle.reversed();
    }
    let ellipse = cosine_loop(s, s.j_min, dir, s.period)?;
    Ok([("apollonius", circle), ("ellipse", ellipse)])
}

pub fn run_apollonius_deviation(s: &Settings, out: &Path) -> Result<Vec<PathBuf>> {
    let paths = apollonius_paths(s)?;
    let jobs: Vec<(usize, CdMode)> = (0..2).flat_map(|k| s.cd_modes.iter().map(move |&m| (k, m))).collect();
    let results = jobs.par_iter().map(|&(k, m)| run_loop(s, &paths[k].1, m)).collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    for (k, (name, schedule)) in paths.iter().enumerate() {
        let mut summaries = Vec::new();
        for (&(j, m), (traj, row)) in jobs.iter().zip(&results) {
            if j == k {
                files.push(write_with(out.join(format!("deviation_{name}_{m}.csv")), |w| traj.write_csv(w))?);
                summaries.push(row.clone());
            }
        }
        files.push(write_drive(out.join(format!("drive_{name}.csv")), schedule, CdMode::Full)?);
        files.push(write_summary(&out.join(format!("summary_{name}.json")), &summaries)?);
    }
    Ok(files)
}
