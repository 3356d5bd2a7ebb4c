//! Fixed-step RK4 evolution of the unnormalized no-jump state.
//!
//! The state is renormalized after every step and the discarded norm is
//! accumulated as `logNorm = ln(‖ψ(t)‖/‖ψ(0)‖)`, so long lossy paths neither
//! underflow nor lose the relative-amplitude information.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::counterdiabatic::{drive_matrix, CdMode};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::metrics::bloch_trace_distance;
use crate::paths::{point_at, track_on_grid, ControlSchedule};
use crate::spectrum::{build_hamiltonian, eigensystem};
use crate::table::write_rows;

/// Largest accepted `dt·‖H‖_F`.
pub const MAX_STEP_PRODUCT: f64 = 0.1;

/// Default number of integrator steps per loop.
pub const DEFAULT_STEPS: usize = 20_000;

/// Sampled evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Unit-norm states.
    pub states: Vec<Vec2>,
    pub log_norm: Vec<f64>,
    /// `(x, y, z)` per sample.
    pub pauli: Vec<[f64; 3]>,
    /// Instantaneous-eigenstate `(x_I, y_I, z_I)` per sample, when tracked.
    pub reference: Option<Vec<[f64; 3]>>,
    pub cd_mode: Option<CdMode>,
}

pub const TRAJECTORY_HEADER: [&str; 9] = ["t", "x", "y", "z", "x_I", "y_I", "z_I", "logNorm", "D"];

impl Trajectory {
    /// Pointwise trace distance to the reference state.
    pub fn trace_distances(&self) -> Option<Vec<f64>> {
        let r = self.reference.as_ref()?;
        Some(self.pauli.iter().zip(r).map(|(a, b)| bloch_trace_distance(*a, *b)).collect())
    }

    /// `t,x,y,z,x_I,y_I,z_I,logNorm,D`; reference columns are NaN when no
    /// reference was tracked.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let d = self.trace_distances();
        let rows = (0..self.times.len()).map(|k| {
            let p = self.pauli[k];
            let r = self.reference.as_ref().map_or([f64::NAN; 3], |r| r[k]);
            let dk = d.as_ref().map_or(f64::NAN, |d| d[k]);
            vec![self.times[k], p[0], p[1], p[2], r[0], r[1], r[2], self.log_norm[k], dk]
        });
        write_rows(writer, &TRAJECTORY_HEADER, rows)
    }
}

/// Integrate `dψ/dt = −iH(t)ψ` on `[0, T]` with `⌈T/dt⌉` equal RK4 steps.
///
/// With `clamp`, every entry of `H` larger than the clamp is saturated.
pub fn evolve<F>(hamiltonian: F, initial: Vec2, period: f64, dt: f64, clamp: Option<f64>) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<Mat2>,
{
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("period must be > 0, got {period}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let steps = ((period / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    evolve_steps(hamiltonian, initial, period, steps, clamp)
}

/// [`evolve`] with an explicit step count.
pub fn evolve_steps<F>(
    hamiltonian: F,
    initial: Vec2,
    period: f64,
    steps: usize,
    clamp: Option<f64>,
) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<Mat2>,
{
    if !initial.is_finite() || !(initial.norm() > 0.0) {
        return Err(Error::InvalidArgument("initial state must be finite and nonzero".into()));
    }
    let h = period / steps as f64;
    let eval = |t: f64| -> Result<Mat2> {
        let m = hamiltonian(t)?;
        let m = match clamp {
            Some(c) => m.clamp_entries(c),
            None => m,
        };
        let product = h * m.frobenius();
        if !(product <= MAX_STEP_PRODUCT) {
            return Err(Error::StepTooLarge { t, product });
        }
        Ok(m)
    };
    let minus_i = C64::new(0.0, -1.0);
    let deriv = |m: &Mat2, v: &Vec2| m.apply(v) * minus_i;

    let mut psi = initial.normalized();
    let mut log_norm = 0.0;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        log_norm: Vec::with_capacity(steps + 1),
        pauli: Vec::with_capacity(steps + 1),
        reference: None,
        cd_mode: None,
    };
    let push = |traj: &mut Trajectory, t: f64, psi: Vec2, ln: f64| {
        traj.times.push(t);
        traj.pauli.push(psi.bloch());
        traj.states.push(psi);
        traj.log_norm.push(ln);
    };
    push(&mut traj, 0.0, psi, 0.0);
    for k in 0..steps {
        let t = k as f64 * h;
        let h_mid = eval(t + 0.5 * h)?;
        let k1 = deriv(&eval(t)?, &psi);
        let k2 = deriv(&h_mid, &(psi + k1 * (0.5 * h)));
        let k3 = deriv(&h_mid, &(psi + k2 * (0.5 * h)));
        let k4 = deriv(&eval(t + h)?, &(psi + k3 * h));
        let next = psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let t_next = if k + 1 == steps { period } else { (k + 1) as f64 * h };
        let n = next.norm();
        if !next.is_finite() || !(n > 0.0) || !n.is_finite() {
            return Err(Error::NonFiniteState { t: t_next });
        }
        log_norm += n.ln();
        psi = next * (1.0 / n);
        push(&mut traj, t_next, psi, log_norm);
    }
    Ok(traj)
}

/// Initial condition for [`evolve_with_cd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `|R−(0)⟩`.
    Minus,
    /// `|R+(0)⟩`.
    Plus,
    Custom(Vec2),
}

impl InitialState {
    /// `|x−⟩ = (|z+⟩ − |z−⟩)/√2`.
    pub fn x_minus() -> Self {
        InitialState::Custom(Vec2::real(FRAC_1_SQRT_2, -FRAC_1_SQRT_2))
    }
}

/// Step count for [`evolve_with_cd`]: at least `T/dt`, rounded up to a
/// multiple of the reporting grid so every reporting time is a sample.
pub fn steps_for(period: f64, dt: f64) -> usize {
    let per = crate::metrics::REPORT_POINTS - 1;
    let raw = ((period / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    raw.div_ceil(per) * per
}

/// Evolve under `H_eff(t)` plus the selected drive and track the
/// instantaneous eigenstate the state started in.
///
/// The clamp, if any, applies to drive entries only.
pub fn evolve_with_cd(
    schedule: &ControlSchedule,
    mode: CdMode,
    initial: InitialState,
    dt: f64,
    clamp: Option<f64>,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let period = schedule.period;
    let steps = steps_for(period, dt);
    let hamiltonian = |t: f64| -> Result<Mat2> {
        let p = point_at(schedule, t, None)?;
        let drive = drive_matrix(mode, &p);
        let drive = match clamp {
            Some(c) => drive.clamp_entries(c),
            None => drive,
        };
        Ok(build_hamiltonian(&p.params) + drive)
    };

    let start = point_at(schedule, 0.0, None)?;
    let eig0 = eigensystem(&start.params, &start.alpha)?;
    let (psi0, mut plus) = match initial {
        InitialState::Minus => (eig0.right_minus, false),
        InitialState::Plus => (eig0.right_plus, true),
        InitialState::Custom(v) => {
            let v = v.normalized();
            let op = eig0.normalized_right(true).inner(&v).norm();
            let om = eig0.normalized_right(false).inner(&v).norm();
            (v, op > om)
        }
    };

    let mut traj = evolve_steps(hamiltonian, psi0, period, steps, None)?;
    traj.cd_mode = Some(mode);

    // follow the reference by maximal overlap with the previous sample
    let path = track_on_grid(schedule, &traj.times, Some(&start.alpha))?;
    let mut reference = Vec::with_capacity(path.len());
    let mut prev: Option<Vec2> = None;
    for p in &path {
        let eig = eigensystem(&p.params, &p.alpha)?;
        let (rp, rm) = (eig.normalized_right(true), eig.normalized_right(false));
        if let Some(prev) = prev {
            plus = prev.inner(&rp).norm() >= prev.inner(&rm).norm();
        }
        let r = if plus { rp } else { rm };
        reference.push(r.bloch());
        prev = Some(r);
    }
    traj.reference = Some(reference);
    Ok(traj)
}
