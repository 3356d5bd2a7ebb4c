//! Control schedules over `(J, Δ, φ)` and branch-tracked mixing angles.
//!
//! A [`ControlSchedule`] is a closed-form (or tabulated) map `t ↦ (Δ, a, φ)`
//! together with its time derivatives. [`tracked_angle`] samples it on the
//! internal grid and continues α(t) across the square-root branch cut, so
//! α_R is a smooth function of time even when the path encircles an EP.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::spectrum::{mixing_angle, ComplexAngle, SystemParams};

/// Internal sampling density for tracking and integration.
pub const DEFAULT_SAMPLES: usize = 2001;

/// Closest allowed approach to either EP, rad/μs in the ε-plane.
pub const EP_MIN_DISTANCE: f64 = 1e-6;

/// Largest accepted disagreement between a tracked step in α and the
/// trapezoid estimate from α̇.
const MAX_STEP_MISMATCH: f64 = 0.25 * PI;

/// Encircling direction in the `(J, Δ)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Δ amplitude < 0.
    Clockwise,
    /// Δ amplitude > 0.
    CounterClockwise,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Clockwise => "cw",
            Direction::CounterClockwise => "ccw",
        }
    }

    /// Sign applied to a Δ amplitude magnitude.
    pub fn sign(&self) -> f64 {
        match self {
            Direction::Clockwise => -1.0,
            Direction::CounterClockwise => 1.0,
        }
    }

    pub fn reversed(&self) -> Direction {
        match self {
            Direction::Clockwise => Direction::CounterClockwise,
            Direction::CounterClockwise => Direction::Clockwise,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cw" | "clockwise" => Ok(Direction::Clockwise),
            "ccw" | "counterclockwise" | "counter-clockwise" => Ok(Direction::CounterClockwise),
            other => Err(Error::InvalidArgument(format!("unknown direction '{other}'"))),
        }
    }
}

/// Time derivatives of the schedule parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamRates {
    pub delta_dot: f64,
    pub amplitude_dot: f64,
    pub phase_dot: f64,
}

/// Linear phase ramp φ(t) = φ₀ + ν·t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRamp {
    pub phi0: f64,
    pub rate: f64,
}

/// Tabulated schedule `t, J_x, J_y, Δ` with cubic interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomTable {
    jx: CubicSpline,
    jy: CubicSpline,
    delta: CubicSpline,
    /// All `J_y` entries are zero: keep the sign of `J_x` with φ = 0.
    real_coupling: bool,
}

impl CustomTable {
    pub fn new(t: Vec<f64>, jx: Vec<f64>, jy: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        let real_coupling = jy.iter().all(|&v| v == 0.0);
        Ok(CustomTable {
            jx: CubicSpline::new(t.clone(), jx)?,
            jy: CubicSpline::new(t.clone(), jy)?,
            delta: CubicSpline::new(t, delta)?,
            real_coupling,
        })
    }

    /// Read a `t,J_x,J_y,delta` CSV (μs and rad/μs).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
        let expected = ["t", "J_x", "J_y", "delta"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Table(format!(
                "expected header t,J_x,J_y,delta, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut cols: [Vec<f64>; 4] = Default::default();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Table(e.to_string()))?;
            for (k, col) in cols.iter_mut().enumerate() {
                let field = record.get(k).unwrap_or("");
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Table(format!("row {}: cannot parse '{field}' as a number", line + 2)))?;
                col.push(v);
            }
        }
        let [t, jx, jy, delta] = cols;
        Self::new(t, jx, jy, delta)
    }

    fn start(&self) -> f64 {
        self.delta.start()
    }

    fn duration(&self) -> f64 {
        self.delta.end() - self.delta.start()
    }

    fn eval(&self, t: f64) -> (f64, f64, f64, ParamRates) {
        let t = t + self.start();
        let (jx, djx) = self.jx.eval(t);
        let (jy, djy) = self.jy.eval(t);
        let (d, dd) = self.delta.eval(t);
        if self.real_coupling {
            return (d, jx, 0.0, ParamRates { delta_dot: dd, amplitude_dot: djx, phase_dot: 0.0 });
        }
        let j = C64::new(jx, jy);
        let jd = C64::new(djx, djy);
        let amp = j.norm();
        if amp == 0.0 {
            return (d, 0.0, 0.0, ParamRates { delta_dot: dd, amplitude_dot: jd.norm(), phase_dot: 0.0 });
        }
        let cross = j.conj() * jd;
        (
            d,
            amp,
            j.arg(),
            ParamRates { delta_dot: dd, amplitude_dot: cross.re / amp, phase_dot: cross.im / (amp * amp) },
        )
    }
}

/// Shape of a control schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    /// `J(t) = (J_max − J_min)/2·cos(2πt/T) + (J_max + J_min)/2`,
    /// `Δ(t) = Δ_amp·sin(2πt/T)`.
    CosineLoop { j_min: f64, j_max: f64, delta_amp: f64 },
    /// Cosine loop that traces an Apollonius circle; kept separately so the
    /// generating ratio stays attached to the schedule.
    ApolloniusCircle { ratio: f64, circle: ApolloniusCircle },
    /// Path given directly in angle space: α_R(t) = α_R0 + ω·t,
    /// α_I(t) = α_I0 + ρ·t, with (Δ, |J|) from [`j_delta_from_angles`].
    /// Constant α_I with a phase ramp traces an Apollonius torus; ω = 0 traces
    /// a constant-α_R (Cassini) curve.
    AngleSweep { alpha_r0: f64, omega: f64, alpha_i0: f64, alpha_i_rate: f64 },
    /// Tabulated schedule.
    Custom(CustomTable),
}

/// A time-parameterized path over `(J, Δ, φ)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub period: f64,
    pub samples: usize,
    pub kappa: f64,
    pub kind: ScheduleKind,
    pub phase: Option<PhaseRamp>,
    /// Traverse `t ↦ T − t`.
    pub reversed: bool,
}

impl ControlSchedule {
    fn build(kind: ScheduleKind, period: f64, kappa: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidArgument(format!("period must be > 0, got {period}")));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be >= 0, got {kappa}")));
        }
        Ok(ControlSchedule { period, samples: DEFAULT_SAMPLES, kappa, kind, phase: None, reversed: false })
    }

    pub fn cosine_loop(j_min: f64, j_max: f64, delta_amp: f64, period: f64, kappa: f64) -> Result<Self> {
        if ![j_min, j_max, delta_amp].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite loop parameter".into()));
        }
        Self::build(ScheduleKind::CosineLoop { j_min, j_max, delta_amp }, period, kappa)
    }

    pub fn angle_sweep(
        alpha_r0: f64,
        omega: f64,
        alpha_i0: f64,
        alpha_i_rate: f64,
        period: f64,
        kappa: f64,
    ) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidArgument("angle sweeps need kappa > 0".into()));
        }
        Self::build(ScheduleKind::AngleSweep { alpha_r0, omega, alpha_i0, alpha_i_rate }, period, kappa)
    }

    pub fn custom(table: CustomTable, kappa: f64) -> Result<Self> {
        let period = table.duration();
        Self::build(ScheduleKind::Custom(table), period, kappa)
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn with_phase(mut self, phase: PhaseRamp) -> Self {
        self.phase = Some(phase);
        self
    }

    pub fn with_period(mut self, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidArgument(format!("period must be > 0, got {period}")));
        }
        if matches!(self.kind, ScheduleKind::Custom(_)) {
            return Err(Error::InvalidArgument("a tabulated schedule's period is fixed by its table".into()));
        }
        self.period = period;
        Ok(self)
    }

    /// Same geometric path traversed backwards in time.
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.reversed = !r.reversed;
        r
    }

    /// Loop direction for cosine-type loops (sign of the Δ amplitude).
    pub fn direction(&self) -> Option<Direction> {
        let amp = match &self.kind {
            ScheduleKind::CosineLoop { delta_amp, .. } => *delta_amp,
            ScheduleKind::ApolloniusCircle { circle, .. } => 2.0 * circle.radius,
            _ => return None,
        };
        if amp == 0.0 {
            return None;
        }
        let forward = if amp < 0.0 { Direction::Clockwise } else { Direction::CounterClockwise };
        Some(if self.reversed { forward.reversed() } else { forward })
    }

    /// Uniform sample times `t_k = T·k/(N−1)`.
    pub fn sample_times(&self) -> Vec<f64> {
        uniform_grid(self.period, self.samples)
    }

    /// Parameters and their rates at `t`.
    pub fn evaluate(&self, t: f64) -> Result<(SystemParams, ParamRates)> {
        let (tau, sign) = if self.reversed { (self.period - t, -1.0) } else { (t, 1.0) };
        let (delta, amp, mut phase, mut rates) = self.eval_forward(tau)?;
        if let Some(ramp) = self.phase {
            phase += ramp.phi0 + ramp.rate * tau;
            rates.phase_dot += ramp.rate;
        }
        rates.delta_dot *= sign;
        rates.amplitude_dot *= sign;
        rates.phase_dot *= sign;
        Ok((SystemParams::with_phase(delta, amp, phase, self.kappa)?, rates))
    }

    pub fn params_at(&self, t: f64) -> Result<SystemParams> {
        Ok(self.evaluate(t)?.0)
    }

    fn eval_forward(&self, t: f64) -> Result<(f64, f64, f64, ParamRates)> {
        let period = self.period;
        match &self.kind {
            ScheduleKind::CosineLoop { j_min, j_max, delta_amp } => {
                Ok(cosine_loop_eval(*j_min, *j_max, *delta_amp, period, t))
            }
            ScheduleKind::ApolloniusCircle { circle, .. } => {
                let (j_min, j_max, amp) = circle.loop_bounds();
                Ok(cosine_loop_eval(j_min, j_max, amp, period, t))
            }
            ScheduleKind::AngleSweep { alpha_r0, omega, alpha_i0, alpha_i_rate } => {
                let ar = alpha_r0 + omega * t;
                let ai = alpha_i0 + alpha_i_rate * t;
                let (delta, amp) = j_delta_from_angles(ar, ai, self.kappa)?;
                let g = angle_jacobian(ar, ai, self.kappa);
                let rates = ParamRates {
                    delta_dot: g[0][0] * omega + g[0][1] * alpha_i_rate,
                    amplitude_dot: g[1][0] * omega + g[1][1] * alpha_i_rate,
                    phase_dot: 0.0,
                };
                Ok((delta, amp, 0.0, rates))
            }
            ScheduleKind::Custom(table) => Ok(table.eval(t)),
        }
    }
}

fn cosine_loop_eval(j_min: f64, j_max: f64, delta_amp: f64, period: f64, t: f64) -> (f64, f64, f64, ParamRates) {
    // wrap so that t = T lands exactly on t = 0
    let s = (t / period).rem_euclid(1.0);
    let w = TAU / period;
    let (sin, cos) = (TAU * s).sin_cos();
    let half_span = 0.5 * (j_max - j_min);
    let amp = half_span * cos + 0.5 * (j_max + j_min);
    let delta = delta_amp * sin;
    let rates = ParamRates { delta_dot: delta_amp * w * cos, amplitude_dot: -half_span * w * sin, phase_dot: 0.0 };
    (delta, amp, 0.0, rates)
}

pub(crate) fn uniform_grid(period: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n).map(|k| if k == n - 1 { period } else { period * k as f64 / (n - 1) as f64 }).collect()
}

/// Parameters of a cosine loop at `t`.
pub fn sample_cosine_loop(schedule: &ControlSchedule, t: f64) -> Result<SystemParams> {
    match schedule.kind {
        ScheduleKind::CosineLoop { .. } | ScheduleKind::ApolloniusCircle { .. } => schedule.params_at(t),
        _ => Err(Error::InvalidArgument("schedule is not a cosine loop".into())),
    }
}

/// An Apollonius circle in the `(J, Δ/2)` plane, centered on the J-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApolloniusCircle {
    pub center: f64,
    pub radius: f64,
    /// Constant hyperbolic angle along the circle.
    pub alpha_i: f64,
}

impl ApolloniusCircle {
    /// `(J_min, J_max, Δ_amp)` of the equivalent cosine loop.
    pub fn loop_bounds(&self) -> (f64, f64, f64) {
        (self.center - self.radius, self.center + self.radius, 2.0 * self.radius)
    }
}

/// Apollonius circle for distance ratio `r`:
/// `c = κ(1 + r²)/(1 − r²)`, `R = 2κr/|1 − r²|`.
pub fn apollonius_from_ratio(r: f64, kappa: f64) -> Result<ApolloniusCircle> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio must be > 0, got {r}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be > 0, got {kappa}")));
    }
    if (r - 1.0).abs() < 1e-12 {
        return Err(Error::DegenerateRatio { ratio: r });
    }
    let d = 1.0 - r * r;
    let center = kappa * (1.0 + r * r) / d;
    let radius = 2.0 * kappa * r / d.abs();
    // ½ln|(ε+iκ)/(ε−iκ)| evaluated at the top of the circle, J = c + R
    let top = center + radius;
    let alpha_i = 0.5 * ((top + kappa) / (top - kappa)).abs().ln();
    Ok(ApolloniusCircle { center, radius, alpha_i })
}

impl ControlSchedule {
    /// Counter-clockwise traversal of the Apollonius circle with ratio `r`.
    pub fn apollonius(r: f64, kappa: f64, period: f64) -> Result<Self> {
        let circle = apollonius_from_ratio(r, kappa)?;
        Self::build(ScheduleKind::ApolloniusCircle { ratio: r, circle }, period, kappa)
    }
}

/// Detuning and coupling modulus for given rotation and hyperbolic angles:
/// `Δ = 2κ sin 2α_R / sinh 2α_I`, `|J| = κ(cosh 2α_I − cos 2α_R)/sinh 2α_I`.
pub fn j_delta_from_angles(alpha_r: f64, alpha_i: f64, kappa: f64) -> Result<(f64, f64)> {
    if alpha_i == 0.0 {
        return Err(Error::HyperbolicSingularity);
    }
    let sh = (2.0 * alpha_i).sinh();
    let delta = 2.0 * kappa * (2.0 * alpha_r).sin() / sh;
    let amp = kappa * ((2.0 * alpha_i).cosh() - (2.0 * alpha_r).cos()) / sh;
    Ok((delta, amp))
}

/// `∂(Δ, |J|)/∂(α_R, α_I)` for [`j_delta_from_angles`].
fn angle_jacobian(alpha_r: f64, alpha_i: f64, kappa: f64) -> [[f64; 2]; 2] {
    let (s2r, c2r) = (2.0 * alpha_r).sin_cos();
    let sh = (2.0 * alpha_i).sinh();
    let ch = (2.0 * alpha_i).cosh();
    [
        [4.0 * kappa * c2r / sh, -4.0 * kappa * s2r * ch / (sh * sh)],
        [2.0 * kappa * s2r / sh, 2.0 * kappa * (c2r * ch - 1.0) / (sh * sh)],
    ]
}

/// One sample of a branch-tracked path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub params: SystemParams,
    pub rates: ParamRates,
    pub alpha: ComplexAngle,
    /// α̇, rad/μs.
    pub alpha_dot: C64,
    /// φ̇, rad/μs.
    pub phi_dot: f64,
}

/// α̇ from ε = Δ/2 + i·a for real-coupling paths:
/// `α̇ = (1/2i)[ε̇/(ε − iκ) − ε̇*/(ε* − iκ)]`.
pub fn alpha_dot_epsilon(params: &SystemParams, rates: &ParamRates) -> C64 {
    let eps = params.epsilon();
    let eps_dot = C64::new(0.5 * rates.delta_dot, rates.amplitude_dot);
    let ik = C64::new(0.0, params.kappa);
    (eps_dot / (eps - ik) - eps_dot.conj() / (eps.conj() - ik)) * C64::new(0.0, -0.5)
}

/// α̇ from the chain rule on `tan α = a/E`: `α̇ = (ȧE − aĖ)/(E² + a²)`.
pub fn alpha_dot_chain(params: &SystemParams, rates: &ParamRates) -> C64 {
    let e = params.energy();
    let a = params.amplitude;
    (e * rates.amplitude_dot - a * 0.5 * rates.delta_dot) / params.discriminant()
}

fn alpha_dot(params: &SystemParams, rates: &ParamRates) -> C64 {
    if params.phase == 0.0 && rates.phase_dot == 0.0 {
        alpha_dot_epsilon(params, rates)
    } else {
        alpha_dot_chain(params, rates)
    }
}

/// Path point at an arbitrary time, continuing α from `previous`.
pub fn point_at(schedule: &ControlSchedule, t: f64, previous: Option<&ComplexAngle>) -> Result<PathPoint> {
    let (params, rates) = schedule.evaluate(t)?;
    let distance = params.ep_distance();
    if distance < EP_MIN_DISTANCE {
        return Err(Error::PathTooCloseToEp { t, distance });
    }
    let alpha = mixing_angle(&params, previous)?;
    Ok(PathPoint { t, params, rates, alpha, alpha_dot: alpha_dot(&params, &rates), phi_dot: rates.phase_dot })
}

/// Sample the schedule on its internal grid and continue α(t) across
/// branch cuts.
pub fn tracked_angle(schedule: &ControlSchedule) -> Result<Vec<PathPoint>> {
    track_on_grid(schedule, &schedule.sample_times(), None)
}

/// Track α along `times`, optionally starting from a known α.
pub fn track_on_grid(
    schedule: &ControlSchedule,
    times: &[f64],
    start: Option<&ComplexAngle>,
) -> Result<Vec<PathPoint>> {
    let mut out: Vec<PathPoint> = Vec::with_capacity(times.len());
    for &t in times {
        let prev = out.last().map(|p| p.alpha).or(start.copied());
        let point = point_at(schedule, t, prev.as_ref())?;
        if let Some(last) = out.last() {
            // nearest-translate continuation is only trustworthy when the step
            // agrees with the integrated rate
            let dt = t - last.t;
            let predicted = last.alpha.value() + (last.alpha_dot + point.alpha_dot) * (0.5 * dt);
            let jump = (point.alpha.value() - predicted).norm();
            if jump >= MAX_STEP_MISMATCH {
                return Err(Error::SamplingTooCoarse { t, jump });
            }
        }
        out.push(point);
    }
    Ok(out)
}

/// Winding numbers of `ε − iκ` and `ε + iκ` around the origin along the path.
pub fn ep_windings(schedule: &ControlSchedule) -> Result<(i64, i64)> {
    let ik = C64::new(0.0, schedule.kappa);
    let mut total = [0.0f64; 2];
    let mut prev: Option<[C64; 2]> = None;
    for t in schedule.sample_times() {
        let params = schedule.params_at(t)?;
        let distance = params.ep_distance();
        if distance < EP_MIN_DISTANCE {
            return Err(Error::PathTooCloseToEp { t, distance });
        }
        let eps = params.epsilon();
        let cur = [eps - ik, eps + ik];
        if let Some(p) = prev {
            for k in 0..2 {
                total[k] += (cur[k] / p[k]).arg();
            }
        }
        prev = Some(cur);
    }
    Ok(((total[0] / TAU).round() as i64, (total[1] / TAU).round() as i64))
}

/// Number of exceptional points enclosed by the loop (0, 1 or 2).
pub fn enclosed_ep_count(schedule: &ControlSchedule) -> Result<usize> {
    let (a, b) = ep_windings(schedule)?;
    Ok((a.unsigned_abs() + b.unsigned_abs()) as usize)
}

/// Largest `|Im α̇|` along a tracked path; zero on an exact Apollonius circle.
pub fn apollonius_residual(path: &[PathPoint]) -> f64 {
    path.iter().map(|p| p.alpha_dot.im.abs()).fold(0.0, f64::max)
}
