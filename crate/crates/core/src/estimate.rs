//! Instantaneous-frequency estimation from quaternion coefficient ratios.
//!
//! At every scale and pixel where the coefficient modulus clears a
//! threshold γ, the logarithmic derivatives Λᵢ = ∂_{bᵢ}c_F · c_F⁻¹ recover
//! the local frequency: for a plane wave A₀cos(k·x) they equal kᵢ·n_θ₀
//! exactly. The scalar pair (ω₁, ω₂) keeps ω₁ = |Λ₁| ≥ 0 and restores the
//! relative sign of ω₂ from sgn Re(∂_{b₁}c_F · conj(∂_{b₂}c_F)), so the
//! orientation θ = atan2(ω₂, ω₁) lives in (−π/2, π/2], the half-plane a
//! real signal can distinguish.

use crate::error::{Error, Result};
use crate::quaternion::{CliffordVector, Quaternion};
use crate::wavelet::{ScaleLayer, ScaleStack};

/// Default relative validity threshold: γ = 1e−4 · max|c_F|.
pub const GAMMA_REL_DEFAULT: f64 = 1e-4;

/// Absolute threshold from the default relative rule.
pub fn default_gamma(max_modulus: f64) -> f64 {
    GAMMA_REL_DEFAULT * max_modulus
}

/// Per-scale, per-pixel frequency data. Produced in two steps:
/// [`lambda_fields`] fills Λ and the validity mask, [`signed_frequencies`]
/// adds the scalar (ω₁, ω₂) pair. Invalid entries hold zeros and are
/// excluded from squeezing.
#[derive(Clone, Debug)]
pub struct FrequencyEstimate {
    gamma: f64,
    width: usize,
    height: usize,
    scales: Vec<f64>,
    lambda1: Vec<Vec<Quaternion>>,
    lambda2: Vec<Vec<Quaternion>>,
    valid: Vec<Vec<bool>>,
    omega1: Vec<Vec<f64>>,
    omega2: Vec<Vec<f64>>,
}

impl FrequencyEstimate {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn scale(&self, layer: usize) -> f64 {
        self.scales[layer]
    }

    pub fn lambda1(&self, layer: usize) -> &[Quaternion] {
        &self.lambda1[layer]
    }

    pub fn lambda2(&self, layer: usize) -> &[Quaternion] {
        &self.lambda2[layer]
    }

    pub fn valid(&self, layer: usize) -> &[bool] {
        &self.valid[layer]
    }

    /// True once [`signed_frequencies`] has populated the scalar fields.
    pub fn is_signed(&self) -> bool {
        !self.omega1.is_empty()
    }

    pub fn omega1(&self, layer: usize) -> &[f64] {
        assert!(self.is_signed(), "signed_frequencies has not run");
        &self.omega1[layer]
    }

    pub fn omega2(&self, layer: usize) -> &[f64] {
        assert!(self.is_signed(), "signed_frequencies has not run");
        &self.omega2[layer]
    }

    /// Orientation estimate atan2(ω₂, ω₁) at one entry.
    pub fn theta_at(&self, layer: usize, idx: usize) -> f64 {
        self.omega2(layer)[idx].atan2(self.omega1(layer)[idx])
    }

    /// Isotropic frequency √(ω₁² + ω₂²) = √(|Λ₁|² + |Λ₂|²).
    pub fn k_iso_at(&self, layer: usize, idx: usize) -> f64 {
        self.omega1(layer)[idx].hypot(self.omega2(layer)[idx])
    }
}

/// Scalar part of d₁·conj(d₂): the inner product that carries the
/// relative sign of the two frequency components. sgn(0) := +1 so
/// degenerate axis-aligned waves keep ω₂ = +0.
fn sign_rule(d1: CliffordVector, d2: CliffordVector) -> f64 {
    let dot = d1.w * d2.w + d1.x * d2.x + d1.y * d2.y;
    if dot >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Fused per-pixel estimate used by the streaming squeeze path: the
/// coefficient, its modulus, and the signed frequency pair, without
/// storing Λ. Returns `None` below the threshold.
pub(crate) struct PixelFreq {
    pub coeff: CliffordVector,
    pub omega1: f64,
    pub omega2: f64,
}

pub(crate) fn pixel_freq(layer: &ScaleLayer, idx: usize, gamma: f64) -> Option<PixelFreq> {
    let c = layer.coeff.at_flat(idx);
    // NaN-safe gate: anything not strictly above gamma is rejected.
    let kept = c.norm() > gamma;
    if !kept {
        return None;
    }
    // |c| > gamma >= 0 rules out the zero vector.
    let inv = c.inverse().expect("nonzero modulus");
    let d1 = layer.db1.at_flat(idx);
    let d2 = layer.db2.at_flat(idx);
    let l1 = d1 * inv;
    let l2 = d2 * inv;
    Some(PixelFreq {
        coeff: c,
        omega1: l1.norm(),
        omega2: l2.norm() * sign_rule(d1, d2),
    })
}

/// Λᵢ = ∂_{bᵢ}c_F · c_F⁻¹ wherever |c_F| > gamma; other entries are
/// marked invalid and carry zeros. Λ is homogeneous of degree zero in the
/// input image, so only the validity mask responds to rescaling.
pub fn lambda_fields(stack: &ScaleStack, gamma: f64) -> Result<FrequencyEstimate> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param("gamma", "validity threshold must be positive"));
    }
    let len = stack.width() * stack.height();
    let mut lambda1 = Vec::with_capacity(stack.layers().len());
    let mut lambda2 = Vec::with_capacity(stack.layers().len());
    let mut valid = Vec::with_capacity(stack.layers().len());
    for layer in stack.layers() {
        let mut l1 = vec![Quaternion::ZERO; len];
        let mut l2 = vec![Quaternion::ZERO; len];
        let mut v = vec![false; len];
        for i in 0..len {
            let c = layer.coeff.at_flat(i);
            if c.norm() > gamma {
                let inv = c.inverse().expect("nonzero modulus");
                l1[i] = layer.db1.at_flat(i) * inv;
                l2[i] = layer.db2.at_flat(i) * inv;
                v[i] = true;
            }
        }
        lambda1.push(l1);
        lambda2.push(l2);
        valid.push(v);
    }
    Ok(FrequencyEstimate {
        gamma,
        width: stack.width(),
        height: stack.height(),
        scales: stack.grid().scales(),
        lambda1,
        lambda2,
        valid,
        omega1: Vec::new(),
        omega2: Vec::new(),
    })
}

/// Populates ω₁ = |Λ₁| and ω₂ = |Λ₂|·sgn Re(∂₁c_F·conj(∂₂c_F)) on the
/// estimate produced by [`lambda_fields`] over the same stack.
pub fn signed_frequencies(est: FrequencyEstimate, stack: &ScaleStack) -> Result<FrequencyEstimate> {
    if est.width != stack.width()
        || est.height != stack.height()
        || est.scales.len() != stack.layers().len()
    {
        return Err(Error::Geometry(
            "estimate and stack shapes differ".to_string(),
        ));
    }
    let mut est = est;
    let len = est.width * est.height;
    let mut omega1 = Vec::with_capacity(est.scales.len());
    let mut omega2 = Vec::with_capacity(est.scales.len());
    for (j, layer) in stack.layers().iter().enumerate() {
        let mut o1 = vec![0.0f64; len];
        let mut o2 = vec![0.0f64; len];
        for i in 0..len {
            if est.valid[j][i] {
                o1[i] = est.lambda1[j][i].norm();
                o2[i] = est.lambda2[j][i].norm()
                    * sign_rule(layer.db1.at_flat(i), layer.db2.at_flat(i));
            }
        }
        omega1.push(o1);
        omega2.push(o2);
    }
    est.omega1 = omega1;
    est.omega2 = omega2;
    Ok(est)
}
