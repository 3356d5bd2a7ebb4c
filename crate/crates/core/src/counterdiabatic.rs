//! Counterdiabatic drives and their Hermitian/anti-Hermitian decomposition.
//!
//! The exact drive transports the biorthogonal eigenbasis,
//! `H_CD = iṪT⁻¹` with `T = R_z(φ)C_y(α)`, which gives
//!
//! ```text
//! H_CD = (φ̇/2)σz + (α̇/2)·R_z(φ)σy R_z(φ)†
//! ```
//!
//! and reduces to `(α̇/2)σy` when φ̇ = 0. Because α̇ is complex in general the
//! drive is not Hermitian; only its Hermitian part can be applied directly.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, I};
use crate::paths::{ControlSchedule, ParamRates, PathPoint};
use crate::spectrum::{eigensystem, mixing_angle, ComplexAngle, Eigensystem, SystemParams};
use crate::table::write_rows;

/// Which auxiliary drive accompanies the bare Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CdMode {
    None,
    HermitianOnly,
    Full,
    ParallelTransport,
}

impl CdMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CdMode::None => "none",
            CdMode::HermitianOnly => "hermitian",
            CdMode::Full => "full",
            CdMode::ParallelTransport => "parallel",
        }
    }
}

impl fmt::Display for CdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(CdMode::None),
            "hermitian" | "hermitianonly" | "hermitian-only" => Ok(CdMode::HermitianOnly),
            "full" => Ok(CdMode::Full),
            "parallel" | "paralleltransport" | "parallel-transport" => Ok(CdMode::ParallelTransport),
            other => Err(Error::InvalidArgument(format!("unknown cd mode '{other}'"))),
        }
    }
}

/// A drive matrix at one instant with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdSample {
    pub t: f64,
    pub full: Mat2,
    /// `(H + H†)/2`
    pub hermitian: Mat2,
    /// `(H − H†)/2`
    pub anti_hermitian: Mat2,
    /// `−i` times the σy coefficient of the full drive; `−iα̇/2` when φ̇ = 0.
    pub j_cd: C64,
    /// Coefficient of `|z+⟩⟨z+|` in the Hermitian part.
    pub delta_cd: f64,
    /// σx coefficient of the Hermitian part.
    pub sigma_x: f64,
    /// σy coefficient of the Hermitian part.
    pub sigma_y: f64,
    /// Identity left over after writing the Hermitian part as
    /// `Δ_CD|z+⟩⟨z+| + c_x σx + c_y σy`; recorded, never applied.
    pub identity_offset: f64,
}

impl CdSample {
    pub fn from_matrix(t: f64, full: Mat2) -> Self {
        let hermitian = full.hermitian_part();
        let anti_hermitian = full.anti_hermitian_part();
        let [_, _, cy_full, _] = full.pauli_components();
        let [h0, hx, hy, hz] = hermitian.pauli_components();
        CdSample {
            t,
            full,
            hermitian,
            anti_hermitian,
            j_cd: -I * cy_full,
            delta_cd: 2.0 * hz.re,
            sigma_x: hx.re,
            sigma_y: hy.re,
            identity_offset: h0.re - hz.re,
        }
    }

    /// The implementable drive `Δ_CD|z+⟩⟨z+| + c_x σx + c_y σy`.
    pub fn implementable(&self) -> Mat2 {
        implementable_form(&self.hermitian)
    }
}

fn implementable_form(hermitian: &Mat2) -> Mat2 {
    let [_, hx, hy, hz] = hermitian.pauli_components();
    Mat2::projector_up() * C64::new(2.0 * hz.re, 0.0)
        + Mat2::from_pauli(C64::new(0.0, 0.0), C64::new(hx.re, 0.0), C64::new(hy.re, 0.0), C64::new(0.0, 0.0))
}

/// A drive sampled along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct CdDrive {
    pub mode: CdMode,
    pub samples: Vec<CdSample>,
}

impl CdDrive {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Largest entry of the anti-Hermitian part along the path.
    pub fn max_anti_hermitian(&self) -> f64 {
        self.samples.iter().map(|s| s.anti_hermitian.max_abs()).fold(0.0, f64::max)
    }

    /// `t,ReJcd,ImJcd,deltaCD`
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        write_rows(writer, &DRIVE_HEADER, self.samples.iter().map(|s| vec![s.t, s.j_cd.re, s.j_cd.im, s.delta_cd]))
    }
}

pub const DRIVE_HEADER: [&str; 4] = ["t", "ReJcd", "ImJcd", "deltaCD"];

/// Exact transport drive from instantaneous parameters and their rates.
/// Independent of α's branch since only α̇ enters.
pub fn cd_matrix(params: &SystemParams, rates: &ParamRates, alpha_dot: C64) -> Mat2 {
    let rz = Mat2::rot_z(params.phase);
    let rotated_y = rz * Mat2::sigma_y() * rz.dagger();
    Mat2::sigma_z() * C64::new(0.5 * rates.phase_dot, 0.0) + rotated_y * (alpha_dot * 0.5)
}

/// `R_z C_y σz C_y⁻¹ R_z†`, the difference of the eigenprojectors `P₊ − P₋`.
fn projector_difference(phase: f64, alpha: &ComplexAngle) -> Mat2 {
    let a = alpha.value();
    let rz = Mat2::rot_z(phase);
    let inner = Mat2::sigma_z() * a.cos() + Mat2::sigma_x() * a.sin();
    rz * inner * rz.dagger()
}

/// Exact drive minus its Berry-connection content:
/// `H∥ = H_CD − (φ̇/2) cos α · (P₊ − P₋)`.
pub fn parallel_transport_matrix(point: &PathPoint) -> Mat2 {
    let exact = cd_matrix(&point.params, &point.rates, point.alpha_dot);
    let cos_a = point.alpha.value().cos();
    exact - projector_difference(point.params.phase, &point.alpha) * (cos_a * (0.5 * point.phi_dot))
}

/// Drive matrix for `mode` at a path point.
pub fn drive_matrix(mode: CdMode, point: &PathPoint) -> Mat2 {
    match mode {
        CdMode::None => Mat2::zero(),
        CdMode::Full => cd_matrix(&point.params, &point.rates, point.alpha_dot),
        CdMode::HermitianOnly => {
            implementable_form(&cd_matrix(&point.params, &point.rates, point.alpha_dot).hermitian_part())
        }
        CdMode::ParallelTransport => parallel_transport_matrix(point),
    }
}

/// `⟨L_n|∂_t R_m⟩` for n, m ∈ (+, −):
/// `−i(φ̇/2)(cos α σz − sin α σx) − i(α̇/2)σy` in the eigenbasis.
pub fn connection_matrix(point: &PathPoint) -> [[C64; 2]; 2] {
    let a = point.alpha.value();
    let rot = (Mat2::sigma_z() * a.cos() - Mat2::sigma_x() * a.sin()) * C64::new(0.0, -0.5 * point.phi_dot);
    let m = rot + Mat2::sigma_y() * (point.alpha_dot * C64::new(0.0, -0.5));
    m.0
}

/// Exact drive along a tracked path.
pub fn cd_exact(path: &[PathPoint]) -> CdDrive {
    CdDrive {
        mode: CdMode::Full,
        samples: path.iter().map(|p| CdSample::from_matrix(p.t, cd_matrix(&p.params, &p.rates, p.alpha_dot))).collect(),
    }
}

const STENCIL_OFFSETS: [f64; 8] = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];
const STENCIL_WEIGHTS: [f64; 8] = [3.0, -32.0, 168.0, -672.0, 672.0, -168.0, 32.0, -3.0];

/// Drive assembled from numerically differentiated eigenvectors:
/// `H = i Σ_n (|∂_t R_n⟩⟨L_n| − ⟨L_n|∂_t R_n⟩|R_n⟩⟨L_n|)`.
///
/// Derivatives use a nine-point (eighth-order) central stencil with step
/// `T/(10·N)` on the branch-tracked parameterized eigenvectors.
pub fn cd_general_form(schedule: &ControlSchedule, path: &[PathPoint]) -> Result<CdDrive> {
    let h = schedule.period / (10.0 * schedule.samples as f64);
    let mut samples = Vec::with_capacity(path.len());
    for p in path {
        let eig = eigensystem(&p.params, &p.alpha)?;
        let nearby = |k: f64| -> Result<Eigensystem> {
            let params = schedule.params_at(p.t + k * h)?;
            let alpha = mixing_angle(&params, Some(&p.alpha))?;
            eigensystem(&params, &alpha)
        };
        let stencil = STENCIL_OFFSETS.iter().map(|&k| nearby(k)).collect::<Result<Vec<_>>>()?;
        let mut total = Mat2::zero();
        for plus in [true, false] {
            let mut dr = Vec2::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for (w, e) in STENCIL_WEIGHTS.iter().zip(&stencil) {
                dr = dr + *e.right(plus) * (w / (840.0 * h));
            }
            let l = eig.left(plus);
            let r = eig.right(plus);
            let berry = l.pair(&dr);
            total += dr.outer_row(l) - r.outer_row(l) * berry;
        }
        samples.push(CdSample::from_matrix(p.t, total * I));
    }
    Ok(CdDrive { mode: CdMode::ParallelTransport, samples })
}

/// Hermitian part of a drive rewritten as `Δ_CD|z+⟩⟨z+| + c_x σx + c_y σy`.
/// The identity offset of the source drive is kept in each sample.
pub fn cd_hermitian_approx(drive: &CdDrive) -> CdDrive {
    CdDrive {
        mode: CdMode::HermitianOnly,
        samples: drive
            .samples
            .iter()
            .map(|s| {
                let mut out = CdSample::from_matrix(s.t, s.implementable());
                out.identity_offset = s.identity_offset;
                out
            })
            .collect(),
    }
}

/// Parallel-transport drive with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelTransport {
    pub drive: CdDrive,
    /// β(t) = −∫₀ᵗ φ̇ cos α dt′, trapezoid rule on the path grid.
    pub beta: Vec<C64>,
    /// `∫⟨L±|∂_t R±⟩dt` over the whole path, ordered (+, −).
    pub berry_integral: [C64; 2],
    /// α_I constant and, at every sample, φ̇ = 0 or cos α = 0.
    pub hermitian_condition: bool,
}

const HERMITICITY_TOLERANCE: f64 = 1e-10;

pub fn cd_parallel_transport(path: &[PathPoint]) -> ParallelTransport {
    let samples = path.iter().map(|p| CdSample::from_matrix(p.t, parallel_transport_matrix(p))).collect();
    let mut beta = Vec::with_capacity(path.len());
    let mut berry = [C64::new(0.0, 0.0); 2];
    let mut acc = C64::new(0.0, 0.0);
    for (k, p) in path.iter().enumerate() {
        if k > 0 {
            let q = &path[k - 1];
            let dt = p.t - q.t;
            let f = |x: &PathPoint| x.alpha.value().cos() * x.phi_dot;
            acc -= (f(p) + f(q)) * (0.5 * dt);
            let (cp, cq) = (connection_matrix(p), connection_matrix(q));
            for n in 0..2 {
                berry[n] += (cp[n][n] + cq[n][n]) * (0.5 * dt);
            }
        }
        beta.push(acc);
    }
    let max_rate = path.iter().map(|p| p.alpha_dot.norm()).fold(0.0, f64::max);
    let constant_im = path.iter().all(|p| p.alpha_dot.im.abs() <= HERMITICITY_TOLERANCE * (1.0 + max_rate));
    let transport_ok = path.iter().all(|p| p.phi_dot == 0.0 || p.alpha.value().cos().norm() <= HERMITICITY_TOLERANCE);
    ParallelTransport {
        drive: CdDrive { mode: CdMode::ParallelTransport, samples },
        beta,
        berry_integral: berry,
        hermitian_condition: constant_im && transport_ok,
    }
}
