//! Shared fixtures for the integration suites: seeded random fields,
//! spectral band projection, and error metrics.

#![allow(dead_code)] // each suite uses its own subset

use std::f64::consts::PI;

use msst::field::{fft2, ifft2, ComplexField, FrequencyGrid, ScalarField};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Relative L2 distance ‖a − b‖ / ‖b‖.
pub fn rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    let diff: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    diff.sqrt() / b.l2_norm().max(f64::MIN_POSITIVE)
}

pub fn dot(a: &ScalarField, b: &ScalarField) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Uniform noise in [−1, 1] on an n×n unit-width grid.
pub fn random_field(n: usize, rng: &mut impl Rng) -> ScalarField {
    ScalarField::new(
        n,
        n,
        1.0 / n as f64,
        (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .expect("valid noise field")
}

/// Projection onto the radial band k_lo ≤ |ξ| ≤ k_hi. Removes DC
/// whenever k_lo > 0 and the self-conjugate Nyquist bins whenever
/// k_hi < π/dx, so the result is exactly representable by symmetric
/// frequency pairs.
pub fn band_pass(f: &ScalarField, k_lo: f64, k_hi: f64) -> ScalarField {
    let spectrum = fft2(f);
    let grid = FrequencyGrid::for_scalar(f);
    let mut data = spectrum.data().to_vec();
    for r in 0..f.height() {
        let xi2 = grid.xi2(r);
        for c in 0..f.width() {
            let xi1 = grid.xi1(c);
            let k = (xi1 * xi1 + xi2 * xi2).sqrt();
            if !(k_lo..=k_hi).contains(&k) {
                data[r * f.width() + c] = Complex64::new(0.0, 0.0);
            }
        }
    }
    ifft2(&ComplexField::new(f.width(), f.height(), f.dx(), data).expect("spectrum")).real()
}

/// Zero-mean field with no Nyquist-row/column energy; on such fields the
/// Riesz identities hold to machine precision.
pub fn nyquist_free(f: &ScalarField) -> ScalarField {
    band_pass(f, f64::MIN_POSITIVE, 0.999 * PI / f.dx())
}

/// Periodic translation by whole samples: out(r, c) = in(r − dr, c − dc).
pub fn translate(f: &ScalarField, dr: usize, dc: usize) -> ScalarField {
    let (w, h) = (f.width(), f.height());
    let mut data = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            data[r * w + c] = f.get((r + h - dr % h) % h, (c + w - dc % w) % w);
        }
    }
    ScalarField::new(w, h, f.dx(), data).expect("translated field")
}

/// Deterministic smooth background for pattern-extraction demos: two
/// low-frequency bumps over a gentle ramp, all spectral content well
/// below the oscillating patterns laid on top of it.
pub fn smooth_background(n: usize) -> ScalarField {
    ScalarField::from_fn(n, n, 1.0 / n as f64, |x, y| {
        0.8 * (-3.0 * ((x - 0.3).powi(2) + (y - 0.45).powi(2))).exp()
            + 0.6 * (-5.0 * ((x - 0.75).powi(2) + (y - 0.2).powi(2))).exp()
            + 0.5 * (2.0 * PI * (1.3 * x + 0.7 * y)).cos()
            + 0.25 * (x - y)
    })
    .expect("background field")
}
