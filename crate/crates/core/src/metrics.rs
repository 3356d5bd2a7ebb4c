//! Density matrices, trace distance and loop summaries.

use crate::counterdiabatic::CdMode;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::paths::{enclosed_ep_count, uniform_grid, ControlSchedule, Direction};
use crate::propagator::Trajectory;
use num_complex::Complex64 as C64;

/// Number of points on the reporting grid.
pub const REPORT_POINTS: usize = 51;

const DENSITY_TOLERANCE: f64 = 1e-10;

/// A validated 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Accepts Hermitian, unit-trace, positive semidefinite matrices
    /// (each within 1e-10).
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NotADensityMatrix { reason: "non-finite entries".into() });
        }
        let herm = (m - m.dagger()).max_abs();
        if herm > DENSITY_TOLERANCE {
            return Err(Error::NotADensityMatrix { reason: format!("not Hermitian (residual {herm:.3e})") });
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(Error::NotADensityMatrix { reason: format!("trace is {tr}") });
        }
        // with unit trace both eigenvalues are ≥ 0 iff the determinant is
        let det = m.det().re;
        if det < -DENSITY_TOLERANCE {
            return Err(Error::NotADensityMatrix { reason: format!("negative eigenvalue (det = {det:.3e})") });
        }
        Ok(DensityMatrix(m))
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn from_state(psi: &Vec2) -> Result<Self> {
        if !(psi.norm() > 0.0) {
            return Err(Error::NotADensityMatrix { reason: "zero state".into() });
        }
        let p = psi.normalized();
        let conj = Vec2::new(p.0[0].conj(), p.0[1].conj());
        Self::new(p.outer_row(&conj))
    }

    /// `½(I + x σx + y σy + z σz)`.
    pub fn from_pauli(r: [f64; 3]) -> Result<Self> {
        let half = |v: f64| C64::new(0.5 * v, 0.0);
        Self::new(Mat2::from_pauli(half(1.0), half(r[0]), half(r[1]), half(r[2])))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn pauli(&self) -> [f64; 3] {
        let [_, x, y, z] = self.0.pauli_components();
        [2.0 * x.re, 2.0 * y.re, 2.0 * z.re]
    }
}

/// `D = ½ Tr√((ρ_A − ρ_B)†(ρ_A − ρ_B))`, half the sum of singular values.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    0.5 * (a.0 - b.0).trace_norm()
}

/// Trace distance between two states given by Bloch vectors, `½|r_A − r_B|`.
pub fn bloch_trace_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Loop-level observables.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSummary {
    pub period: f64,
    /// D̄ on the 51-point reporting grid.
    pub avg_trace_distance: f64,
    /// D̄ over every integrator sample.
    pub avg_trace_distance_fine: f64,
    pub x_t: f64,
    pub enclosed_eps: usize,
    pub direction: Option<Direction>,
    pub cd_mode: Option<CdMode>,
}

/// Summarize a trajectory that carries instantaneous-eigenstate references.
pub fn summarize_loop(trajectory: &Trajectory, schedule: &ControlSchedule) -> Result<LoopSummary> {
    let d = trajectory
        .trace_distances()
        .ok_or_else(|| Error::InvalidArgument("trajectory has no reference states to compare against".into()))?;
    let times = &trajectory.times;
    let (&t0, &t1) = (times.first().unwrap(), times.last().unwrap());
    if (t0).abs() > 1e-12 * schedule.period || (t1 - schedule.period).abs() > 1e-9 * schedule.period {
        return Err(Error::InvalidArgument(format!(
            "trajectory covers [{t0}, {t1}] but the schedule period is {}",
            schedule.period
        )));
    }
    let grid = uniform_grid(schedule.period, REPORT_POINTS);
    let coarse: f64 = grid.iter().map(|&t| interpolate(times, &d, t)).sum::<f64>() / grid.len() as f64;
    let fine = d.iter().sum::<f64>() / d.len() as f64;
    Ok(LoopSummary {
        period: schedule.period,
        avg_trace_distance: coarse,
        avg_trace_distance_fine: fine,
        x_t: trajectory.pauli.last().unwrap()[0],
        enclosed_eps: enclosed_ep_count(schedule)?,
        direction: schedule.direction(),
        cd_mode: trajectory.cd_mode,
    })
}

/// Linear interpolation on a sorted grid; exact at grid points.
pub(crate) fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&s| s < t);
    if k == 0 {
        return values[0];
    }
    if k >= times.len() {
        return *values.last().unwrap();
    }
    let (ta, tb) = (times[k - 1], times[k]);
    if (tb - t).abs() <= 1e-12 * tb.abs().max(1.0) {
        return values[k];
    }
    let w = (t - ta) / (tb - ta);
    values[k - 1] * (1.0 - w) + values[k] * w
}
