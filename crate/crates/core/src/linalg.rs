//! Fixed-size 2×2 complex algebra.
//!
//! Everything in this crate lives in the two-dimensional space spanned by
//! `{|z+⟩, |z−⟩}`, so vectors and operators are stored inline as arrays
//! rather than going through a general matrix library.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A complex two-component vector (ket or, when used as a row, bra).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2(pub [C64; 2]);

/// A complex 2×2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Vec2 {
    pub const fn new(a: C64, b: C64) -> Self {
        Vec2([a, b])
    }

    pub fn real(a: f64, b: f64) -> Self {
        Vec2([C64::new(a, 0.0), C64::new(b, 0.0)])
    }

    /// Hermitian inner product `⟨self|other⟩` (conjugates `self`).
    pub fn inner(&self, other: &Vec2) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// Bilinear pairing of a row vector with a column vector, no conjugation.
    pub fn pair(&self, other: &Vec2) -> C64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Vec2 {
        let n = self.norm();
        Vec2([self.0[0] / n, self.0[1] / n])
    }

    pub fn scale(&self, s: C64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Outer product `|self⟩⟨row|` where `row` is taken as given (no conjugation).
    pub fn outer_row(&self, row: &Vec2) -> Mat2 {
        Mat2([[self.0[0] * row.0[0], self.0[0] * row.0[1]], [self.0[1] * row.0[0], self.0[1] * row.0[1]]])
    }

    /// Pauli expectation values `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of the normalized state.
    pub fn bloch(&self) -> [f64; 3] {
        let n = self.norm_sqr();
        let c = self.0[0].conj() * self.0[1];
        [2.0 * c.re / n, 2.0 * c.im / n, (self.0[0].norm_sqr() - self.0[1].norm_sqr()) / n]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Mul<C64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: C64) -> Vec2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2([self.0[0] * rhs, self.0[1] * rhs])
    }
}

impl Index<usize> for Vec2 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn sigma_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn sigma_y() -> Self {
        Mat2([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn sigma_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]])
    }

    /// `|z+⟩⟨z+|`
    pub const fn projector_up() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ZERO]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// `e^{-i θ σz / 2}`
    pub fn rot_z(theta: f64) -> Self {
        let h = C64::from_polar(1.0, -0.5 * theta);
        Mat2::diag(h, h.conj())
    }

    /// `e^{-i α σy / 2}` for complex α; a rotation composed with a boost.
    pub fn rot_y(alpha: C64) -> Self {
        let c = (alpha * 0.5).cos();
        let s = (alpha * 0.5).sin();
        Mat2([[c, -s], [s, c]])
    }

    /// Build `c0·I + cx·σx + cy·σy + cz·σz`.
    pub fn from_pauli(c0: C64, cx: C64, cy: C64, cz: C64) -> Self {
        Mat2([[c0 + cz, cx - I * cy], [cx + I * cy, c0 - cz]])
    }

    /// Coefficients `(c0, cx, cy, cz)` in the Pauli basis.
    pub fn pauli_components(&self) -> [C64; 4] {
        let m = &self.0;
        [
            (m[0][0] + m[1][1]) * 0.5,
            (m[0][1] + m[1][0]) * 0.5,
            (m[1][0] - m[0][1]) * (I * -0.5),
            (m[0][0] - m[1][1]) * 0.5,
        ]
    }

    pub fn dagger(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of the two singular values (trace norm), via
    /// `(s1 + s2)^2 = ‖M‖_F^2 + 2|det M|`.
    pub fn trace_norm(&self) -> f64 {
        let f = self.frobenius();
        (f * f + 2.0 * self.det().norm()).sqrt()
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([m[0][0] * v.0[0] + m[0][1] * v.0[1], m[1][0] * v.0[0] + m[1][1] * v.0[1]])
    }

    /// Row vector times matrix, `⟨row| M`.
    pub fn apply_left(&self, row: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([row.0[0] * m[0][0] + row.0[1] * m[1][0], row.0[0] * m[0][1] + row.0[1] * m[1][1]])
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Mat2 {
        (*self + self.dagger()).scale(C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part `(M − M†)/2`.
    pub fn anti_hermitian_part(&self) -> Mat2 {
        (*self - self.dagger()).scale(C64::new(0.5, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Saturate every entry whose magnitude exceeds `limit`, keeping its phase.
    pub fn clamp_entries(&self, limit: f64) -> Mat2 {
        let mut out = *self;
        for c in out.0.iter_mut().flatten() {
            let n = c.norm();
            if n > limit {
                *c *= limit / n;
            }
        }
        out
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        *self = *self + rhs;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        self.apply(&rhs)
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: C64) -> Mat2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: f64) -> Mat2 {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_round_trip() {
        let m = Mat2::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.3), C64::new(0.7, -1.1), C64::new(0.2, 0.0));
        let [c0, cx, cy, cz] = m.pauli_components();
        let back = Mat2::from_pauli(c0, cx, cy, cz);
        assert!((back - m).frobenius() < 1e-15);
    }

    #[test]
    fn rotations_are_unimodular() {
        let r = Mat2::rot_y(C64::new(0.4, 0.9));
        assert!((r.det() - ONE).norm() < 1e-14);
        let z = Mat2::rot_z(1.3);
        assert!((z * z.dagger() - Mat2::identity()).frobenius() < 1e-15);
    }

    #[test]
    fn trace_norm_of_hermitian_difference() {
        // |z+><z+| - |x+><x+| has singular values 1/sqrt2, 1/sqrt2.
        let x = Vec2::real(1.0, 1.0).normalized();
        let px = x.outer_row(&Vec2([x.0[0].conj(), x.0[1].conj()]));
        let d = Mat2::projector_up() - px;
        assert!((d.trace_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clamp_keeps_phase() {
        let m = Mat2::new(C64::new(3.0, 4.0), ZERO, ZERO, ONE);
        let c = m.clamp_entries(1.0);
        assert!((c[(0, 0)] - C64::new(0.6, 0.8)).norm() < 1e-15);
        assert_eq!(c[(1, 1)], ONE);
    }
}
