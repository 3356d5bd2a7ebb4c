//! Experiment configuration: a TOML file with sections, flag overrides, and
//! per-experiment defaults.
//!
//! ```toml
//! experiment = "encircle"
//! output = "out/encircle"
//!
//! [physical]
//! gamma_e = 1.37
//! gamma_f = 0.21
//!
//! [schedule]
//! j_min = 0.0
//! j_max = 30.0
//! delta_amp = 31.41592653589793
//! period = 0.2
//!
//! [integration]
//! cd = "full"
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use ptcd_core::counterdiabatic::CdMode;
use ptcd_core::paths::Direction;

use crate::error::{Result, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AdiabaticitySweep,
    Encircle,
    PeriodSweep,
    ApolloniusDeviation,
    TopologyScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::AdiabaticitySweep,
        ExperimentKind::Encircle,
        ExperimentKind::PeriodSweep,
        ExperimentKind::ApolloniusDeviation,
        ExperimentKind::TopologyScan,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::AdiabaticitySweep => "adiabaticity_sweep",
            ExperimentKind::Encircle => "encircle",
            ExperimentKind::PeriodSweep => "period_sweep",
            ExperimentKind::ApolloniusDeviation => "apollonius_deviation",
            ExperimentKind::TopologyScan => "topology_scan",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == key || k.as_str().replace('_', "") == key)
            .ok_or_else(|| RunError::config("experiment", format!("unknown experiment '{s}'")))
    }
}

/// Decay rates or κ. Giving κ together with both rates is rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physical {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<f64>,
    /// Signed; the sign picks the direction unless `direction` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "text")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "text")]
    pub cd: Option<CdMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_drive_amp: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_min_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Apollonius {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub physical: Physical,
    #[serde(default, skip_serializing_if = "is_default")]
    pub schedule: Schedule,
    #[serde(default, skip_serializing_if = "is_default")]
    pub integration: Integration,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sweep: Sweep,
    #[serde(default, skip_serializing_if = "is_default")]
    pub apollonius: Apollonius,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Flag-level overrides, applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<ExperimentKind>,
    pub output: Option<PathBuf>,
    pub dt: Option<f64>,
    pub period: Option<f64>,
    pub direction: Option<Direction>,
    pub cd: Option<CdMode>,
    pub max_drive_amp: Option<f64>,
    pub j_min: Option<f64>,
    pub j_max: Option<f64>,
    pub delta_amp: Option<f64>,
    pub gamma_e: Option<f64>,
    pub gamma_f: Option<f64>,
    pub kappa: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            output: None,
            physical: Physical::default(),
            schedule: Schedule::default(),
            integration: Integration::default(),
            sweep: Sweep::default(),
            apollonius: Apollonius::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are all representable in TOML")
    }

    /// Flags win over the file. Setting κ clears both rates and vice versa.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(e) = o.experiment {
            self.experiment = e;
        }
        if o.output.is_some() {
            self.output = o.output.clone();
        }
        let set = |dst: &mut Option<f64>, src: Option<f64>| {
            if src.is_some() {
                *dst = src;
            }
        };
        set(&mut self.integration.dt, o.dt);
        set(&mut self.integration.max_drive_amp, o.max_drive_amp);
        set(&mut self.schedule.period, o.period);
        set(&mut self.schedule.j_min, o.j_min);
        set(&mut self.schedule.j_max, o.j_max);
        set(&mut self.schedule.delta_amp, o.delta_amp);
        if o.direction.is_some() {
            self.schedule.direction = o.direction;
        }
        if o.cd.is_some() {
            self.integration.cd = o.cd;
        }
        if o.gamma_e.is_some() || o.gamma_f.is_some() {
            self.physical.kappa = None;
            set(&mut self.physical.gamma_e, o.gamma_e);
            set(&mut self.physical.gamma_f, o.gamma_f);
        }
        if o.kappa.is_some() {
            self.physical = Physical { kappa: o.kappa, ..Physical::default() };
        }
    }

    pub fn resolve(&self) -> Result<Settings> {
        Settings::from_config(self)
    }
}

/// Fully defaulted and validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentKind,
    pub kappa: f64,
    pub j_min: f64,
    pub j_max: f64,
    /// Signed Δ amplitude as given or defaulted.
    pub delta_amp: f64,
    pub period: f64,
    pub directions: Vec<Direction>,
    pub samples: usize,
    /// `None` means `T / DEFAULT_STEPS` per run.
    pub dt: Option<f64>,
    pub cd_modes: Vec<CdMode>,
    pub clamp: Option<f64>,
    pub periods: Vec<f64>,
    pub j_min_values: Vec<f64>,
    pub ratio: f64,
}

/// Loss rates used where the defaults are given as decay rates.
pub const DEFAULT_GAMMA_E: f64 = 1.37;
pub const DEFAULT_GAMMA_F: f64 = 0.21;

pub fn kappa_from_rates(gamma_e: f64, gamma_f: f64) -> f64 {
    (gamma_e - gamma_f) / 4.0
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| match k {
            0 => a,
            _ if k == n - 1 => b,
            _ => (la + (lb - la) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

impl Settings {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        use ExperimentKind::*;
        let kind = c.experiment;
        let kappa = resolve_kappa(kind, &c.physical)?;

        let (j_min, j_max, delta_amp) = match kind {
            ApolloniusDeviation => (0.007, 30.3, 0.7 * PI),
            _ => (0.0, 30.0, -10.0 * PI),
        };
        let s = &c.schedule;
        let j_min = s.j_min.unwrap_or(j_min);
        let j_max = s.j_max.unwrap_or(j_max);
        let delta_amp = s.delta_amp.unwrap_or(delta_amp);
        let period = s.period.unwrap_or(0.2);
        let samples = s.samples.unwrap_or(ptcd_core::paths::DEFAULT_SAMPLES);
        finite("schedule.j_min", j_min)?;
        finite("schedule.j_max", j_max)?;
        finite("schedule.delta_amp", delta_amp)?;
        positive("schedule.period", period)?;
        if j_max <= j_min {
            return Err(RunError::config("schedule.j_max", format!("must exceed j_min ({j_max} <= {j_min})")));
        }
        if delta_amp == 0.0 {
            return Err(RunError::config("schedule.delta_amp", "must be nonzero"));
        }
        if samples < 3 {
            return Err(RunError::config("schedule.samples", format!("need at least 3, got {samples}")));
        }

        let from_sign = if delta_amp < 0.0 { Direction::Clockwise } else { Direction::CounterClockwise };
        let directions = match (s.direction, kind) {
            (Some(d), _) => vec![d],
            (None, AdiabaticitySweep | Encircle | PeriodSweep) => {
                vec![Direction::Clockwise, Direction::CounterClockwise]
            }
            (None, _) => vec![from_sign],
        };

        let i = &c.integration;
        if let Some(dt) = i.dt {
            positive("integration.dt", dt)?;
        }
        if let Some(a) = i.max_drive_amp {
            positive("integration.max_drive_amp", a)?;
        }
        let cd_modes = match (i.cd, kind) {
            (Some(CdMode::ParallelTransport), _) => {
                return Err(RunError::config("integration.cd", "expected none, hermitian or full"))
            }
            (Some(CdMode::None), ApolloniusDeviation) => {
                return Err(RunError::config("integration.cd", "apollonius_deviation needs a drive"))
            }
            (Some(m), _) => vec![m],
            (None, Encircle | PeriodSweep) => vec![CdMode::None, CdMode::HermitianOnly, CdMode::Full],
            (None, ApolloniusDeviation) => vec![CdMode::HermitianOnly, CdMode::Full],
            (None, _) => vec![CdMode::Full],
        };
        if kind == TopologyScan && cd_modes == [CdMode::None] {
            return Err(RunError::config("integration.cd", "topology_scan compares a drive against none"));
        }

        let periods = match &c.sweep.periods {
            Some(p) => p.clone(),
            None if kind == PeriodSweep => log_space(0.01, 5.0, 25),
            None => log_space(0.01, 5.0, 40),
        };
        if periods.is_empty() {
            return Err(RunError::config("sweep.periods", "empty"));
        }
        for (k, &p) in periods.iter().enumerate() {
            positive(&format!("sweep.periods[{k}]"), p)?;
        }
        if kind == PeriodSweep {
            let lo = periods.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = periods.iter().cloned().fold(0.0, f64::max);
            if lo > 0.01 || hi < 5.0 {
                return Err(RunError::config("sweep.periods", format!("must span [0.01, 5], got [{lo}, {hi}]")));
            }
        }
        let j_min_values = c.sweep.j_min_values.clone().unwrap_or_else(|| lin_space(-1.0, 1.0, 81));
        if j_min_values.is_empty() {
            return Err(RunError::config("sweep.j_min_values", "empty"));
        }
        for (k, &v) in j_min_values.iter().enumerate() {
            finite(&format!("sweep.j_min_values[{k}]"), v)?;
            if v >= j_max {
                return Err(RunError::config(&format!("sweep.j_min_values[{k}]"), "must be below j_max"));
            }
        }
        let ratio = c.apollonius.ratio.unwrap_or(0.9733);
        positive("apollonius.ratio", ratio)?;
        if (ratio - 1.0).abs() < 1e-12 {
            return Err(RunError::config("apollonius.ratio", "ratio 1 degenerates to a line"));
        }

        Ok(Settings {
            experiment: kind,
            kappa,
            j_min,
            j_max,
            delta_amp,
            period,
            directions,
            samples,
            dt: i.dt,
            cd_modes,
            clamp: i.max_drive_amp,
            periods,
            j_min_values,
            ratio,
        })
    }

    /// Δ amplitude with the sign of `direction`.
    pub fn signed_amp(&self, direction: Direction) -> f64 {
        direction.sign() * self.delta_amp.abs()
    }
}

fn resolve_kappa(kind: ExperimentKind, p: &Physical) -> Result<f64> {
    let kappa = match (p.gamma_e, p.gamma_f, p.kappa) {
        (Some(_), Some(_), Some(_)) => {
            return Err(RunError::config(
                "physical.kappa",
                "is derived from gamma_e and gamma_f; give one or the other",
            ))
        }
        (Some(_), None, _) => return Err(RunError::config("physical.gamma_f", "missing (gamma_e given)")),
        (None, Some(_), _) => return Err(RunError::config("physical.gamma_e", "missing (gamma_f given)")),
        (Some(ge), Some(gf), None) => {
            finite("physical.gamma_e", ge)?;
            finite("physical.gamma_f", gf)?;
            if ge < 0.0 || gf < 0.0 {
                return Err(RunError::config("physical", "decay rates must be >= 0"));
            }
            if ge < gf {
                return Err(RunError::config("physical.gamma_e", "must be >= gamma_f"));
            }
            kappa_from_rates(ge, gf)
        }
        (None, None, Some(k)) => k,
        (None, None, None) => match kind {
            ExperimentKind::ApolloniusDeviation => 0.413,
            ExperimentKind::TopologyScan => 0.21,
            _ => kappa_from_rates(DEFAULT_GAMMA_E, DEFAULT_GAMMA_F),
        },
    };
    finite("physical.kappa", kappa)?;
    if kappa < 0.0 {
        return Err(RunError::config("physical.kappa", format!("must be >= 0, got {kappa}")));
    }
    Ok(kappa)
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(RunError::config(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RunError::config(field, format!("must be > 0, got {v}")))
    }
}

/// Serialize optional enums through their string forms.
mod text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        Option::<String>::deserialize(d)?.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}
