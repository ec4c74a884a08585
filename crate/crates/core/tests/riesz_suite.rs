//! Operator identities of the discrete Riesz transform on twenty seeded
//! zero-mean 64×64 noise fields, each within 1e−10. The fields carry no
//! Nyquist-row/column energy: those bins are self-conjugate, so an
//! antisymmetric multiplier cannot represent them in a real field, and
//! leaving them in would turn exact identities into O(1/N) ones.

mod common;

use common::{dot, nyquist_free, random_field, rng, translate};
use msst::field::{riesz, rotate_ccw90, ScalarField};

const N: usize = 64;
const FIELDS: usize = 20;
const TOL: f64 = 1e-10;

fn fields() -> Vec<ScalarField> {
    let mut r = rng(0x52495a);
    (0..FIELDS)
        .map(|_| nyquist_free(&random_field(N, &mut r)))
        .collect()
}

fn assert_close(a: &ScalarField, b: &ScalarField, scale: f64, what: &str) {
    let err = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    assert!(err <= TOL * scale, "{what}: max abs err {err:e} at scale {scale:e}");
}

#[test]
fn riesz_components_are_antisymmetric() {
    let fields = fields();
    for pair in fields.chunks_exact(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let (r1f, r2f) = riesz(f);
        let (r1g, r2g) = riesz(g);
        let scale = f.l2_norm() * g.l2_norm();
        assert!((dot(&r1f, g) + dot(f, &r1g)).abs() <= TOL * scale);
        assert!((dot(&r2f, g) + dot(f, &r2g)).abs() <= TOL * scale);
    }
}

#[test]
fn riesz_vector_is_unitary() {
    for f in fields() {
        let (r1, r2) = riesz(&f);
        let norm_sqr = r1.l2_norm().powi(2) + r2.l2_norm().powi(2);
        let expected = f.l2_norm().powi(2);
        assert!(
            (norm_sqr - expected).abs() <= TOL * expected,
            "energy {norm_sqr} vs {expected}"
        );
    }
}

#[test]
fn riesz_squares_sum_to_minus_identity() {
    for f in fields() {
        let (r1, r2) = riesz(&f);
        let (r11, _) = riesz(&r1);
        let (_, r22) = riesz(&r2);
        let scale = f.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = f
            .data()
            .iter()
            .zip(r11.data().iter().zip(r22.data()))
            .map(|(v, (a, b))| (a + b + v).abs())
            .fold(0.0f64, f64::max);
        assert!(err <= TOL * scale, "max abs err {err:e}");
    }
}

#[test]
fn riesz_steers_under_quarter_turns() {
    // For g = f∘R⁻¹ with R the 90° CCW rotation, the Riesz vector
    // rotates alongside: 𝓡₁g = −(𝓡₂f)∘R⁻¹ and 𝓡₂g = (𝓡₁f)∘R⁻¹.
    for f in fields() {
        let (r1, r2) = riesz(&f);
        let rotated = rotate_ccw90(&f).unwrap();
        let (r1_rot, r2_rot) = riesz(&rotated);
        let scale = f.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let minus_rot_r2 = rotate_ccw90(&r2).unwrap().map(|v| -v).unwrap();
        let rot_r1 = rotate_ccw90(&r1).unwrap();
        assert_close(&r1_rot, &minus_rot_r2, scale, "first component");
        assert_close(&r2_rot, &rot_r1, scale, "second component");
    }
}

#[test]
fn riesz_commutes_with_translation() {
    let mut r = rng(0x7452414e);
    for _ in 0..4 {
        let f = nyquist_free(&random_field(N, &mut r));
        let (dr, dc) = (17, 41);
        let shifted = translate(&f, dr, dc);
        let (r1s, r2s) = riesz(&shifted);
        let (r1, r2) = riesz(&f);
        let scale = f.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_close(&r1s, &translate(&r1, dr, dc), scale, "first component");
        assert_close(&r2s, &translate(&r2, dr, dc), scale, "second component");
    }
}

#[test]
fn constants_map_to_zero() {
    let f = ScalarField::from_fn(N, N, 1.0 / N as f64, |_, _| 3.25).unwrap();
    let (r1, r2) = riesz(&f);
    assert!(r1.l2_norm() <= 1e-12);
    assert!(r2.l2_norm() <= 1e-12);
}
