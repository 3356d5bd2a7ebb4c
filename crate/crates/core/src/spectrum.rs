//! Closed-form eigenstructure of the passive PT-dimer
//!
//! ```text
//! H = [[2E, J*], [J, 0]],   E = Δ/2 − iκ,   J = a·e^{iφ}
//! ```
//!
//! The eigenbasis is generated by a complex rotation about the Bloch y-axis
//! followed by a real rotation about z, `|R±⟩ = R_z(φ)·C_y(α)|z±⟩`, with the
//! complex mixing angle fixed by `tan α = a/E`. Eigenvalue labels are tied to
//! the branch of α, so a branch-tracked α keeps the λ± labels and the
//! eigenvectors in step across the square-root cut.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, I};

/// `|J|² + E²` below this (squared rad/μs) counts as an exceptional point.
pub const EP_TOLERANCE: f64 = 1e-18;

/// Relative slack used when deciding that two branch candidates tie.
const BRANCH_TIE_TOLERANCE: f64 = 1e-9;

/// Instantaneous Hamiltonian parameters.
///
/// The coupling is stored as a signed amplitude and a phase, `J = a·e^{iφ}`.
/// Keeping the sign lets a real coupling pass smoothly through zero with the
/// phase held at 0, which is what parameter loops in the real `(J, Δ)` plane
/// need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Detuning Δ, rad/μs.
    pub delta: f64,
    /// Signed coupling amplitude a, rad/μs.
    pub amplitude: f64,
    /// Coupling phase φ, rad.
    pub phase: f64,
    /// Loss rate κ ≥ 0, 1/μs.
    pub kappa: f64,
}

impl SystemParams {
    /// Real (possibly negative) coupling with φ = 0.
    pub fn real(delta: f64, coupling: f64, kappa: f64) -> Result<Self> {
        Self::with_phase(delta, coupling, 0.0, kappa)
    }

    /// Complex coupling, decomposed into `|J|` and `arg J`.
    pub fn complex(delta: f64, coupling: C64, kappa: f64) -> Result<Self> {
        let phase = if coupling.norm() == 0.0 { 0.0 } else { coupling.arg() };
        Self::with_phase(delta, coupling.norm(), phase, kappa)
    }

    pub fn with_phase(delta: f64, amplitude: f64, phase: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be >= 0, got {kappa}")));
        }
        if !(delta.is_finite() && amplitude.is_finite() && phase.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidArgument("non-finite system parameter".into()));
        }
        Ok(SystemParams { delta, amplitude, phase, kappa })
    }

    /// Complex coupling J.
    pub fn coupling(&self) -> C64 {
        C64::from_polar(self.amplitude, self.phase)
    }

    /// Complex energy E = Δ/2 − iκ.
    pub fn energy(&self) -> C64 {
        C64::new(0.5 * self.delta, -self.kappa)
    }

    /// ε = Δ/2 + i·a, the complex coordinate of the real-coupling plane.
    pub fn epsilon(&self) -> C64 {
        C64::new(0.5 * self.delta, self.amplitude)
    }

    /// `a² + E²`, which vanishes exactly at the exceptional points.
    pub fn discriminant(&self) -> C64 {
        let e = self.energy();
        e * e + self.amplitude * self.amplitude
    }

    /// Distance in the ε-plane to the nearer of the two EPs at ε = ±iκ.
    pub fn ep_distance(&self) -> f64 {
        let eps = self.epsilon();
        let k = C64::new(0.0, self.kappa);
        (eps - k).norm().min((eps + k).norm())
    }
}

/// Build `H = [[2E, J*], [J, 0]]` in the `{|z+⟩, |z−⟩}` basis.
pub fn build_hamiltonian(params: &SystemParams) -> Mat2 {
    let j = params.coupling();
    Mat2::new(params.energy() * 2.0, j.conj(), j, C64::new(0.0, 0.0))
}

/// Complex mixing angle α = α_R + iα_I.
///
/// `re` is the analytically continued real part; `branch` counts how many
/// multiples of π separate it from the principal value in (−π/2, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAngle {
    pub re: f64,
    pub im: f64,
    pub branch: i64,
}

impl ComplexAngle {
    pub fn new(re: f64, im: f64) -> Self {
        ComplexAngle { re, im, branch: branch_of(re) }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    fn shifted(&self, k: i64) -> Self {
        ComplexAngle { re: self.re + k as f64 * PI, im: self.im, branch: self.branch + k }
    }
}

fn branch_of(re: f64) -> i64 {
    // number of π shifts from (−π/2, π/2]
    (-((FRAC_PI_2 - re) / PI).floor()) as i64
}

/// Mixing angle with `tan α = a/E`.
///
/// Without `previous`, returns the principal value with α_R ∈ (−π/2, π/2].
/// With `previous`, returns the π-translate closest to it, which is the
/// analytic continuation along a finely sampled path.
pub fn mixing_angle(params: &SystemParams, previous: Option<&ComplexAngle>) -> Result<ComplexAngle> {
    let disc = params.discriminant();
    if disc.norm() < EP_TOLERANCE {
        return Err(Error::AtExceptionalPoint { discriminant: disc.norm() });
    }
    let e = params.energy();
    let ia = C64::new(0.0, params.amplitude);
    // e^{2iα} = (E + ia)/(E − ia)
    let ratio = (e + ia) / (e - ia);
    let mut alpha = ratio.ln() * C64::new(0.0, -0.5);
    // ln puts arg in (−π, π]; the sign of a zero imaginary part can land us
    // on −π, which belongs to the other end of the interval.
    if alpha.re <= -FRAC_PI_2 {
        alpha.re += PI;
    }
    let principal = ComplexAngle { re: alpha.re, im: alpha.im, branch: 0 };
    match previous {
        None => Ok(principal),
        Some(prev) => continue_branch(principal, prev),
    }
}

/// Pick the π-translate of `principal` nearest to `prev`.
pub fn continue_branch(principal: ComplexAngle, prev: &ComplexAngle) -> Result<ComplexAngle> {
    let k = ((prev.re - principal.re) / PI).round() as i64;
    let best = principal.shifted(k);
    let d_best = (best.re - prev.re).abs();
    let alt = if best.re > prev.re { principal.shifted(k - 1) } else { principal.shifted(k + 1) };
    let d_alt = (alt.re - prev.re).abs();
    if (d_alt - d_best).abs() <= BRANCH_TIE_TOLERANCE * (1.0 + prev.re.abs()) {
        return Err(Error::AmbiguousBranch { previous: prev.re });
    }
    Ok(best)
}

/// Biorthogonal eigensystem in the parameterized (non-unit-norm) gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub right_plus: Vec2,
    pub right_minus: Vec2,
    /// Row vectors; `⟨L_n|R_m⟩` is the plain bilinear pairing.
    pub left_plus: Vec2,
    pub left_minus: Vec2,
    /// Eigenvalue of the traceless part `H − E·I`, tied to α's branch.
    pub xi: C64,
}

impl Eigensystem {
    pub fn right(&self, plus: bool) -> &Vec2 {
        if plus {
            &self.right_plus
        } else {
            &self.right_minus
        }
    }

    pub fn left(&self, plus: bool) -> &Vec2 {
        if plus {
            &self.left_plus
        } else {
            &self.left_minus
        }
    }

    pub fn lambda(&self, plus: bool) -> C64 {
        if plus {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }

    /// Unit-norm view of `|R±⟩`.
    pub fn normalized_right(&self, plus: bool) -> Vec2 {
        self.right(plus).normalized()
    }

    /// Matrix of `⟨L_n|R_m⟩`, rows/columns ordered (+, −).
    pub fn biorthogonality(&self) -> [[C64; 2]; 2] {
        let ls = [&self.left_plus, &self.left_minus];
        let rs = [&self.right_plus, &self.right_minus];
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (n, l) in ls.iter().enumerate() {
            for (m, r) in rs.iter().enumerate() {
                out[n][m] = l.pair(r);
            }
        }
        out
    }
}

/// Eigenvalues and biorthogonal eigenvectors for a given (branch-consistent) α.
///
/// The square root in `λ± = E ± sqrt(a² + E²)` is taken as `a/sin α`, or
/// `E/cos α` when `sin α` vanishes, so the labels follow α's branch.
pub fn eigensystem(params: &SystemParams, alpha: &ComplexAngle) -> Result<Eigensystem> {
    let e = params.energy();
    let disc = params.discriminant();
    if disc.norm() < EP_TOLERANCE && (params.amplitude != 0.0 || e.norm() != 0.0) {
        return Err(Error::AtExceptionalPoint { discriminant: disc.norm() });
    }
    let a = alpha.value();
    let sin_a = a.sin();
    let xi = if sin_a.norm() > 1e-8 { params.amplitude / sin_a } else { e / a.cos() };

    let half = a * 0.5;
    let (c, s) = (half.cos(), half.sin());
    let p = C64::from_polar(1.0, -0.5 * params.phase); // e^{-iφ/2}
    let pc = p.conj();

    Ok(Eigensystem {
        lambda_plus: e + xi,
        lambda_minus: e - xi,
        right_plus: Vec2::new(p * c, pc * s),
        right_minus: Vec2::new(-p * s, pc * c),
        left_plus: Vec2::new(pc * c, p * s),
        left_minus: Vec2::new(-pc * s, p * c),
        xi,
    })
}

/// Bloch coordinates `(z, x, y)` of the right eigenvectors for a general phase.
///
/// Returns `[(z+, x+, y+), (z−, x−, y−)]` in the orientation of the
/// appendix map, which differs from the plain Pauli expectation values of
/// `|R±⟩` by the half-turn `(x, z) → (−x, −z)` about the y-axis (see
/// [`eigenvector_pauli`] for the direct expectations).
pub fn bloch_coordinates(alpha: &ComplexAngle, phi: f64) -> [(f64, f64, f64); 2] {
    let th = alpha.im.tanh();
    let sech = (1.0 - th * th).sqrt();
    let (cr, sr) = (alpha.re.cos(), alpha.re.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let coords = |sign: f64| (-sign * cr * sech, -sign * cp * sr * sech + sp * th, cp * th + sign * sp * sr * sech);
    [coords(1.0), coords(-1.0)]
}

/// Pauli expectation values `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of the normalized `|R±⟩`.
pub fn eigenvector_pauli(eig: &Eigensystem, plus: bool) -> [f64; 3] {
    eig.right(plus).bloch()
}

/// Angle θ between the normalized right eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapAngle {
    /// θ = arccos|tanh α_I|, rad.
    pub theta: f64,
    /// `|⟨Λ−|Λ+⟩|² = tanh² α_I`.
    pub transition_probability: f64,
}

pub fn overlap_angle(alpha: &ComplexAngle) -> OverlapAngle {
    let th = alpha.im.tanh();
    OverlapAngle { theta: th.abs().min(1.0).acos(), transition_probability: th * th }
}

/// Chiral operator `Γ = R_z(φ)·σy·R_z(φ)†`.
pub fn chiral_operator(phi: f64) -> Mat2 {
    let r = Mat2::rot_z(phi);
    r * Mat2::sigma_y() * r.dagger()
}

/// Residuals of the chiral-symmetry identities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralReport {
    /// ‖Γ H′ Γ + H′‖ with `H′ = H − ½Tr(H)·I`.
    pub anticommutation: f64,
    /// ‖Γ² − I‖.
    pub involution: f64,
    /// Residuals that need a well-defined eigenbasis.
    pub eigen: Result<ChiralEigenResiduals>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiralEigenResiduals {
    /// ‖Γ|R+⟩ − i|R−⟩‖
    pub exchange_plus: f64,
    /// ‖Γ|R−⟩ + i|R+⟩‖
    pub exchange_minus: f64,
    /// |E − ξ cos α|
    pub energy_identity: f64,
    /// |a − ξ sin α|
    pub coupling_identity: f64,
    /// ‖(H′ − ξ)|R+⟩‖ + ‖(H′ + ξ)|R−⟩‖, checks that ±ξ are the eigenvalues of H′.
    pub xi_eigen: f64,
}

pub fn chiral_checks(params: &SystemParams) -> ChiralReport {
    let h = build_hamiltonian(params);
    let h_shift = h - Mat2::identity() * (h.trace() * 0.5);
    let gamma = chiral_operator(params.phase);
    let anticommutation = (gamma * h_shift * gamma + h_shift).frobenius();
    let involution = (gamma * gamma - Mat2::identity()).frobenius();

    let eigen = mixing_angle(params, None).and_then(|alpha| {
        let eig = eigensystem(params, &alpha)?;
        let a = alpha.value();
        let exchange_plus = (gamma.apply(&eig.right_plus) - eig.right_minus * I).norm();
        let exchange_minus = (gamma.apply(&eig.right_minus) + eig.right_plus * I).norm();
        let xi_eigen = (h_shift.apply(&eig.right_plus) - eig.right_plus * eig.xi).norm()
            + (h_shift.apply(&eig.right_minus) + eig.right_minus * eig.xi).norm();
        Ok(ChiralEigenResiduals {
            exchange_plus,
            exchange_minus,
            energy_identity: (params.energy() - eig.xi * a.cos()).norm(),
            coupling_identity: (params.amplitude - eig.xi * a.sin()).norm(),
            xi_eigen,
        })
    });

    ChiralReport { anticommutation, involution, eigen }
}
