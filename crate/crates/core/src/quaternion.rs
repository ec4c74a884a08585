//! Quaternion and Clifford-vector arithmetic.
//!
//! Monogenic signals and their wavelet coefficients take values in the
//! subspace of quaternions with zero k-part, called Clifford vectors here.
//! That subspace is closed under addition and inversion but not under
//! multiplication, so the full Hamilton algebra lives alongside it. The
//! polar decomposition below is the demodulation primitive: it splits a
//! Clifford vector into amplitude, scalar phase, and orientation.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Quaternion w + x·i + y·j + z·k under the Hamilton product:
/// i² = j² = k² = −1, ij = −ji = k, jk = −kj = i, ki = −ik = j.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// |q|; multiplicative: |q·q′| = |q|·|q′|.
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// (w, −x, −y, −z); anti-homomorphism: conj(q·q′) = conj(q′)·conj(q).
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Multiplicative inverse conj(q)/|q|².
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::NotInvertible);
        }
        Ok(self.conj() * (1.0 / n2))
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

/// Quaternion with zero k-part: w + x·i + y·j.
///
/// Closed under addition and inversion; the product of two Clifford
/// vectors generally has a k-part, so `Mul` yields a full [`Quaternion`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CliffordVector {
    pub w: f64,
    pub x: f64,
    pub y: f64,
}

impl CliffordVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64) -> Self {
        Self { w, x, y }
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y)
    }

    /// conj(q)/|q|²; the inverse of a Clifford vector is again one.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::NotInvertible);
        }
        let s = 1.0 / n2;
        Ok(Self::new(self.w * s, -self.x * s, -self.y * s))
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s)
    }

    /// A·(cos φ + sin φ cos θ·i + sin φ sin θ·j). Callers pass amplitude ≥ 0.
    pub fn from_polar(p: PolarForm) -> Self {
        let (sin_phi, cos_phi) = p.phase.sin_cos();
        let (sin_theta, cos_theta) = p.orientation.sin_cos();
        Self::new(
            p.amplitude * cos_phi,
            p.amplitude * sin_phi * cos_theta,
            p.amplitude * sin_phi * sin_theta,
        )
    }

    /// Amplitude |q|, phase atan2(|vect q|, w) ∈ [0, π], orientation
    /// atan2(y, x) ∈ [0, 2π). The phase sine is nonnegative by
    /// construction, so no unwrapping is ever needed. When the vector
    /// part vanishes the orientation is undefined and set to 0.
    pub fn polar_decompose(self) -> Result<PolarForm> {
        let amplitude = self.norm();
        if amplitude == 0.0 {
            return Err(Error::ZeroPolar);
        }
        let v = (self.x * self.x + self.y * self.y).sqrt();
        let phase = v.atan2(self.w);
        let orientation = if v == 0.0 {
            0.0
        } else {
            let t = self.y.atan2(self.x);
            if t < 0.0 {
                t + 2.0 * std::f64::consts::PI
            } else {
                t
            }
        };
        Ok(PolarForm {
            amplitude,
            phase,
            orientation,
        })
    }
}

/// Free-function form of [`CliffordVector::from_polar`].
pub fn exp_polar(amplitude: f64, phase: f64, orientation: f64) -> CliffordVector {
    CliffordVector::from_polar(PolarForm {
        amplitude,
        phase,
        orientation,
    })
}

impl From<CliffordVector> for Quaternion {
    fn from(c: CliffordVector) -> Self {
        Self::new(c.w, c.x, c.y, 0.0)
    }
}

impl Add for CliffordVector {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y)
    }
}

impl AddAssign for CliffordVector {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl Sub for CliffordVector {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y)
    }
}

impl Neg for CliffordVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y)
    }
}

impl Mul<f64> for CliffordVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul for CliffordVector {
    type Output = Quaternion;
    fn mul(self, r: Self) -> Quaternion {
        Quaternion::from(self) * Quaternion::from(r)
    }
}

/// Polar data of a Clifford vector: q = A(cos φ + sin φ cos θ·i + sin φ sin θ·j).
///
/// `phase` lies in [0, 2π) by type; [`CliffordVector::polar_decompose`]
/// produces values in [0, π]. `orientation` lies in [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarForm {
    pub amplitude: f64,
    pub phase: f64,
    pub orientation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn assert_quat_eq(a: Quaternion, b: Quaternion, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "quaternions differ: {a:?} vs {b:?}"
        );
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::J, -Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::K, -Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        assert_eq!(Quaternion::J * Quaternion::J, -Quaternion::ONE);
        assert_eq!(Quaternion::K * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn mul_identity() {
        let q = Quaternion::new(0.3, -1.2, 4.5, 0.7);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(Quaternion::ONE * q, q);
    }

    #[test]
    fn mul_expand_one_plus_i_times_one_plus_j() {
        let a = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(a * b, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conj_basics() {
        assert_eq!(Quaternion::I.conj(), -Quaternion::I);
        assert_eq!(
            Quaternion::new(1.0, 1.0, 1.0, 1.0).conj(),
            Quaternion::new(1.0, -1.0, -1.0, -1.0)
        );
    }

    #[test]
    fn conj_anti_homomorphism() {
        let q = Quaternion::new(0.4, -2.0, 1.5, 3.0);
        let r = Quaternion::new(-1.0, 0.25, 2.0, -0.5);
        assert_quat_eq((q * r).conj(), r.conj() * q.conj(), 1e-14);
    }

    #[test]
    fn inverse_examples() {
        assert_quat_eq(Quaternion::I.inverse().unwrap(), -Quaternion::I, 0.0);
        assert_quat_eq(
            Quaternion::new(2.0, 0.0, 0.0, 0.0).inverse().unwrap(),
            Quaternion::new(0.5, 0.0, 0.0, 0.0),
            0.0,
        );
        let q = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        assert_quat_eq(
            q.inverse().unwrap(),
            Quaternion::new(0.5, -0.5, 0.0, 0.0),
            0.0,
        );
        assert_quat_eq(q * q.inverse().unwrap(), Quaternion::ONE, 1e-12);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(
            Quaternion::ZERO.inverse(),
            Err(Error::NotInvertible)
        ));
        assert!(matches!(
            CliffordVector::ZERO.inverse(),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn exp_polar_examples() {
        let one = exp_polar(1.0, 0.0, 1.234);
        assert_eq!(one, CliffordVector::new(1.0, 0.0, 0.0));

        let i = exp_polar(1.0, FRAC_PI_2, 0.0);
        assert!((i - CliffordVector::new(0.0, 1.0, 0.0)).norm() < 1e-15);

        let twoj = exp_polar(2.0, FRAC_PI_2, FRAC_PI_2);
        assert!((twoj - CliffordVector::new(0.0, 0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn polar_decompose_examples() {
        let p = CliffordVector::new(3.0, 0.0, 0.0).polar_decompose().unwrap();
        assert_eq!((p.amplitude, p.phase, p.orientation), (3.0, 0.0, 0.0));

        let p = CliffordVector::new(0.0, 1.0, 0.0).polar_decompose().unwrap();
        assert!((p.amplitude - 1.0).abs() < 1e-15);
        assert!((p.phase - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.orientation, 0.0);

        let p = CliffordVector::new(SQRT_2 / 2.0, 0.0, SQRT_2 / 2.0)
            .polar_decompose()
            .unwrap();
        assert!((p.amplitude - 1.0).abs() < 1e-15);
        assert!((p.phase - FRAC_PI_4).abs() < 1e-15);
        assert!((p.orientation - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn polar_decompose_zero_fails() {
        assert!(matches!(
            CliffordVector::ZERO.polar_decompose(),
            Err(Error::ZeroPolar)
        ));
    }

    #[test]
    fn polar_phase_range_and_negative_real() {
        // Negative real axis maps to phase pi, not to a negative phase.
        let p = CliffordVector::new(-2.0, 0.0, 0.0).polar_decompose().unwrap();
        assert!((p.phase - PI).abs() < 1e-15);
        assert_eq!(p.orientation, 0.0);
    }

    #[test]
    fn clifford_product_leaves_subspace() {
        // i·j = k: the product of two Clifford vectors can be pure k.
        let a = CliffordVector::new(0.0, 1.0, 0.0);
        let b = CliffordVector::new(0.0, 0.0, 1.0);
        assert_eq!(a * b, Quaternion::K);
    }
}
