//! Acceptance gate: every numbered criterion prints one PASS/FAIL line
//! and the test fails if any criterion does. Run with
//! `cargo test --test acceptance -- --nocapture` to watch the lines.

mod common;

use std::f64::consts::{LN_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{band_pass, random_field, rel_l2, rng, smooth_background};
use msst::estimate::{lambda_fields, signed_frequencies, GAMMA_REL_DEFAULT};
use msst::field::{riesz, rotate_ccw90, ScalarField};
use msst::modes::{decompose, extract_ridges, mse, reconstruct_mode, trim_border, ExtractedMode};
use msst::quaternion::{CliffordVector, Quaternion};
use msst::squeeze::{
    msst_isotropic, msst_pipeline, reconstruct_from_squeeze, FrequencyBins, SqueezeStack,
};
use msst::synth::{
    analytic_gradients, compose_with_pattern, plane_wave, test_signal_3comp, GridSpec,
};
use msst::wavelet::{monogenic_cwt, pointwise_reconstruct, ScaleGrid, WaveletSpec};
use rand::Rng;

type Verdict = Result<String, String>;

fn spec12() -> WaveletSpec {
    WaveletSpec::new(1.0, 2.0).unwrap()
}

/// The full-size run shared by the reproduction and concentration
/// criteria: three-component test signal at 512x512, 32 voices. The
/// squeeze of the full signal feeds the concentration check; the modes
/// come from the matching-pursuit decomposition with two refinement
/// sweeps.
struct BigRun {
    sq: SqueezeStack,
    modes: Vec<ExtractedMode>,
    refs: [ScalarField; 3],
    squeeze_secs: f64,
    decompose_secs: f64,
}

fn big_run() -> BigRun {
    let grid = GridSpec::new(512).unwrap();
    let (signal, refs) = test_signal_3comp(grid);
    let spec = spec12();
    let sgrid = ScaleGrid::default_for(512, grid.dx(), spec.mu(), 32).unwrap();
    let t0 = Instant::now();
    let (sq, _) = msst_pipeline(&signal, &spec, &sgrid, GAMMA_REL_DEFAULT).unwrap();
    let squeeze_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let modes = decompose(&signal, &spec, &sgrid, GAMMA_REL_DEFAULT, 3, 5, 2).unwrap();
    let decompose_secs = t1.elapsed().as_secs_f64();
    BigRun {
        sq,
        modes,
        refs,
        squeeze_secs,
        decompose_secs,
    }
}

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Criterion 1: the three extracted modes reproduce the test-signal
/// components within the published error budget after a 1/8 border trim.
fn criterion_1(big: &BigRun) -> Verdict {
    const CEILING: [f64; 3] = [0.08, 0.11, 0.10];
    const TARGET: [f64; 3] = [0.03, 0.06, 0.05];
    const BAND: f64 = 0.05;

    let mut errs = [[0.0f64; 3]; 3];
    for (i, m) in big.modes.iter().enumerate() {
        let rec = trim_border(m.clifford.re(), 0.125).map_err(|e| e.to_string())?;
        for (r, reference) in big.refs.iter().enumerate() {
            let t = trim_border(reference, 0.125).map_err(|e| e.to_string())?;
            errs[i][r] = mse(&rec, &t).map_err(|e| e.to_string())?;
        }
    }
    // perm[i] = reference index assigned to mode i; minimize the total.
    let perm = PERMS3
        .iter()
        .min_by(|a, b| {
            let ta: f64 = a.iter().enumerate().map(|(i, r)| errs[i][*r]).sum();
            let tb: f64 = b.iter().enumerate().map(|(i, r)| errs[i][*r]).sum();
            ta.total_cmp(&tb)
        })
        .unwrap();
    let mut by_ref = [0.0f64; 3];
    for (i, r) in perm.iter().enumerate() {
        by_ref[*r] = errs[i][*r];
    }
    let detail = format!(
        "trimmed MSE f1 {:.4} f2 {:.4} f3 {:.4} (squeeze {:.1}s, decompose {:.1}s)",
        by_ref[0], by_ref[1], by_ref[2], big.squeeze_secs, big.decompose_secs
    );
    for r in 0..3 {
        if by_ref[r] > CEILING[r] {
            return Err(format!(
                "component {} MSE {:.4} exceeds ceiling {}; {detail}",
                r + 1,
                by_ref[r],
                CEILING[r]
            ));
        }
        if (by_ref[r] - TARGET[r]).abs() > BAND {
            return Err(format!(
                "component {} MSE {:.4} outside {}±{}; {detail}",
                r + 1,
                by_ref[r],
                TARGET[r],
                BAND
            ));
        }
    }
    Ok(detail)
}

/// Criterion 2: on pure plane waves the coefficients match the closed
/// form, the log-derivative fields match kᵢ·n_θ₀, and the recovered
/// orientation (sign included) is exact for both vertical senses.
fn criterion_2() -> Verdict {
    const WAVES: [[f64; 2]; 6] = [
        [8.0, 0.0],
        [0.0, 8.0],
        [6.0, 3.0],
        [6.0, -3.0],
        [-5.0, 7.0],
        [4.0, -9.0],
    ];
    const A0: f64 = 1.3;
    const ALPHA: f64 = 0.4;
    let n = 64usize;
    let grid = GridSpec::new(n).unwrap();
    let spec = spec12();

    let mut worst_coeff = 0.0f64;
    let mut worst_lambda = 0.0f64;
    let mut worst_theta = 0.0f64;
    for cycles in WAVES {
        let k = [2.0 * PI * cycles[0], 2.0 * PI * cycles[1]];
        let kn = k[0].hypot(k[1]);
        let (n1, n2) = (k[0] / kn, k[1] / kn);
        let f = plane_wave(grid, A0, k, ALPHA);
        // Five voices straddling the response peak a = mu/|k|.
        let jc = (8.0 * (spec.mu() / kn).log2()).round() as i32;
        let sgrid = ScaleGrid::new(8, jc - 2, jc + 2).unwrap();
        let stack = monogenic_cwt(&f, &spec, &sgrid).unwrap();
        let gamma = GAMMA_REL_DEFAULT * stack.max_modulus();
        let est =
            signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();

        for (j, layer) in stack.layers().iter().enumerate() {
            let a = layer.scale;
            let s = a * spec.hat_radial(a * kn);
            if s * A0 < 1e-3 {
                continue;
            }
            for row in 0..n {
                for col in 0..n {
                    let i = row * n + col;
                    let (x, y) = (col as f64 * grid.dx(), row as f64 * grid.dx());
                    let chi = k[0] * x + k[1] * y + ALPHA;
                    let expect = CliffordVector::new(
                        s * A0 * chi.cos(),
                        s * A0 * n1 * chi.sin(),
                        s * A0 * n2 * chi.sin(),
                    );
                    let got = layer.coeff.at_flat(i);
                    worst_coeff = worst_coeff.max((got - expect).norm() / (s * A0));

                    if est.valid(j)[i] {
                        let e1 = Quaternion::new(0.0, k[0] * n1, k[0] * n2, 0.0);
                        let e2 = Quaternion::new(0.0, k[1] * n1, k[1] * n2, 0.0);
                        let d1 = (est.lambda1(j)[i] - e1).norm();
                        let d2 = (est.lambda2(j)[i] - e2).norm();
                        worst_lambda = worst_lambda.max(d1.max(d2) / kn);

                        // Sign recovery must be exact where defined.
                        let o2 = est.omega2(j)[i];
                        if k[1] != 0.0 && o2.signum() != (k[0] * k[1]).signum() {
                            return Err(format!(
                                "omega2 sign {} for wave {cycles:?}",
                                o2.signum()
                            ));
                        }
                        let theta = est.theta_at(j, i);
                        let want = k[1].atan2(k[0]);
                        let d = (theta - want).rem_euclid(PI);
                        worst_theta = worst_theta.max(d.min(PI - d));
                    }
                }
            }
        }
    }
    if worst_coeff > 1e-8 {
        return Err(format!("closed-form coefficient error {worst_coeff:e}"));
    }
    if worst_lambda > 1e-6 {
        return Err(format!("lambda error {worst_lambda:e}"));
    }
    if worst_theta > 1e-6 {
        return Err(format!("orientation error {worst_theta:e}"));
    }
    Ok(format!(
        "6 wavevectors: coeff rel {worst_coeff:.1e}, lambda rel {worst_lambda:.1e}, theta {worst_theta:.1e}, signs exact"
    ))
}

fn dot(a: &ScalarField, b: &ScalarField) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Criterion 3: Riesz transform identities on random zero-mean fields.
fn criterion_3() -> Verdict {
    const TOL: f64 = 1e-10;
    let n = 64usize;
    let mut r = rng(0x52495a);
    let fields: Vec<ScalarField> = (0..20)
        .map(|_| {
            let f = random_field(n, &mut r);
            let mean = f.mean();
            common::nyquist_free(&f.map(|v| v - mean).unwrap())
        })
        .collect();

    let mut worst = 0.0f64;
    for pair in fields.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let (r1f, r2f) = riesz(f);
        let (r1g, r2g) = riesz(g);
        let scale = f.l2_norm() * g.l2_norm();
        // Antisymmetry of both components.
        worst = worst.max((dot(&r1f, g) + dot(f, &r1g)).abs() / scale);
        worst = worst.max((dot(&r2f, g) + dot(f, &r2g)).abs() / scale);
        // Unitarity on the zero-mean Nyquist-free subspace.
        let ff = dot(f, f);
        worst = worst.max((dot(&r1f, &r1f) + dot(&r2f, &r2f) - ff).abs() / ff);
        // R1^2 + R2^2 = -Id.
        let (r11, _) = riesz(&r1f);
        let (_, r22) = riesz(&r2f);
        let fmax = f.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let resid = r11
            .data()
            .iter()
            .zip(r22.data())
            .zip(f.data())
            .map(|((a, b), c)| (a + b + c).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(resid / fmax);
        // Steerability under a quarter turn.
        let rot = rotate_ccw90(f).unwrap();
        let (r1r, r2r) = riesz(&rot);
        let e1 = rel_l2(&r1r, &rotate_ccw90(&r2f).unwrap().map(|v| -v).unwrap());
        let e2 = rel_l2(&r2r, &rotate_ccw90(&r1f).unwrap());
        worst = worst.max(e1).max(e2);
    }
    if worst > TOL {
        return Err(format!("worst Riesz identity error {worst:e}"));
    }
    Ok(format!("20 fields, worst identity error {worst:.1e}"))
}

/// Criterion 4: quaternion algebra and the polar form, 10^4 random cases.
fn criterion_4() -> Verdict {
    const TOL: f64 = 1e-12;
    let mut r = rng(0x51554154);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut c = || r.gen_range(-100.0..100.0);
        let q = Quaternion::new(c(), c(), c(), c());
        let p = Quaternion::new(c(), c(), c(), c());
        let s = Quaternion::new(c(), c(), c(), c());

        let prod = q * p;
        worst = worst.max((prod.norm() - q.norm() * p.norm()).abs() / (q.norm() * p.norm()));
        let assoc = ((q * p) * s - q * (p * s)).norm() / (q.norm() * p.norm() * s.norm());
        worst = worst.max(assoc);
        let conj = ((q * p).conj() - p.conj() * q.conj()).norm() / (q.norm() * p.norm());
        worst = worst.max(conj);
        if q.norm() > 1e-6 {
            let inv = q.inverse().unwrap();
            worst = worst.max((q * inv - Quaternion::ONE).norm());
            worst = worst.max((inv * q - Quaternion::ONE).norm());
        }

        let v = CliffordVector::new(c(), c(), c());
        if v.norm() > 1e-9 {
            let polar = v.polar_decompose().map_err(|e| e.to_string())?;
            if !(0.0..=PI).contains(&polar.phase)
                || !(0.0..2.0 * PI).contains(&polar.orientation)
            {
                return Err(format!(
                    "polar ranges violated: phase {} orientation {}",
                    polar.phase, polar.orientation
                ));
            }
            let back = CliffordVector::new(
                polar.amplitude * polar.phase.cos(),
                polar.amplitude * polar.phase.sin() * polar.orientation.cos(),
                polar.amplitude * polar.phase.sin() * polar.orientation.sin(),
            );
            worst = worst.max((back - v).norm() / v.norm());
        }
    }
    if worst > TOL {
        return Err(format!("worst algebra error {worst:e}"));
    }
    Ok(format!("10^4 cases, worst error {worst:.1e}"))
}

/// Criterion 5: in-band reconstruction error and the exact identity
/// between the squeeze sum and the thresholded pointwise formula.
fn criterion_5() -> Verdict {
    let n = 64usize;
    let spec = spec12();
    let grid = ScaleGrid::default_for(n, 1.0 / n as f64, 1.0, 32).unwrap();
    let mut worst_rec = 0.0f64;
    for seed in [11u64, 57, 1999] {
        let f = band_pass(
            &random_field(n, &mut rng(seed)),
            2.0 * PI * 4.0,
            2.0 * PI * 12.0,
        );
        let stack = monogenic_cwt(&f, &spec, &grid).unwrap();
        let rec = pointwise_reconstruct(&stack).unwrap();
        worst_rec = worst_rec.max(rel_l2(&rec, &f));
    }
    if worst_rec > 2e-2 {
        return Err(format!("reconstruction rel L2 {worst_rec:e}"));
    }

    let f = band_pass(
        &random_field(n, &mut rng(0xAB)),
        2.0 * PI * 4.0,
        2.0 * PI * 12.0,
    );
    let sgrid = ScaleGrid::default_for(n, 1.0 / n as f64, 1.0, 16).unwrap();
    let stack = monogenic_cwt(&f, &spec, &sgrid).unwrap();
    let gamma = 1e-2 * stack.max_modulus();
    let est = signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();
    let bins = FrequencyBins::log_spaced(1e-2, 1e7, 300).unwrap();
    let sq = msst_isotropic(&stack, &est, &bins).unwrap();
    if sq.dropped_mass() != 0.0 {
        return Err("identity fixture dropped mass".to_string());
    }
    let from_squeeze = reconstruct_from_squeeze(&sq, &spec).unwrap();
    let norm = 2.0 * PI / msst::wavelet::tilde_c_psi(&spec).unwrap();
    let nv = stack.grid().n_voices() as f64;
    let mut worst_id = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n * n {
        let mut acc = CliffordVector::ZERO;
        for layer in stack.layers() {
            let c = layer.coeff.at_flat(i);
            if c.norm() > gamma {
                acc += c * (LN_2 / nv / layer.scale);
            }
        }
        let direct = acc * norm;
        scale = scale.max(direct.norm());
        worst_id = worst_id.max((from_squeeze.at_flat(i) - direct).norm());
    }
    if worst_id > 1e-12 * scale {
        return Err(format!("squeeze-sum identity error {worst_id:e} at scale {scale:e}"));
    }
    Ok(format!(
        "in-band rel L2 {worst_rec:.1e} (<= 2e-2), squeeze-sum identity {:.1e} relative",
        worst_id / scale
    ))
}

/// Criterion 6: mass bookkeeping is bit-reproducible (a scalar replay in
/// the library's summation order matches every slot and both totals) and
/// bin sums regroup the kept scale sums.
fn criterion_6() -> Verdict {
    let n = 64usize;
    let nv = 8u32;
    let grid = GridSpec::new(n).unwrap();
    let (signal, _) = test_signal_3comp(grid);
    let spec = spec12();
    let sgrid = ScaleGrid::default_for(n, grid.dx(), spec.mu(), nv).unwrap();
    let stack = monogenic_cwt(&signal, &spec, &sgrid).unwrap();
    let gamma = GAMMA_REL_DEFAULT * stack.max_modulus();
    let est = signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();
    let bins = FrequencyBins::from_scale_grid(&sgrid, spec.mu()).unwrap();
    let sq = msst_isotropic(&stack, &est, &bins).unwrap();

    let n_bins = bins.len();
    let mut slots = vec![0.0f64; n * n * n_bins * 3];
    let mut partials = vec![(0.0f64, 0.0f64); n];
    for (j, layer) in stack.layers().iter().enumerate() {
        let w_scale = LN_2 / nv as f64 / layer.scale;
        let (valid, o1, o2) = (est.valid(j), est.omega1(j), est.omega2(j));
        for row in 0..n {
            let row_data = &mut slots[row * n * n_bins * 3..(row + 1) * n * n_bins * 3];
            let (mut seen, mut dropped) = (0.0f64, 0.0f64);
            for col in 0..n {
                let i = row * n + col;
                if !valid[i] {
                    continue;
                }
                let c = layer.coeff.at_flat(i);
                let mass = c.norm() * w_scale;
                seen += mass;
                match bins.index_of(o1[i].hypot(o2[i])) {
                    Some(p) => {
                        let s = (col * n_bins + p) * 3;
                        row_data[s] += w_scale * c.w;
                        row_data[s + 1] += w_scale * c.x;
                        row_data[s + 2] += w_scale * c.y;
                    }
                    None => dropped += mass,
                }
            }
            partials[row].0 += seen;
            partials[row].1 += dropped;
        }
    }
    let (mut total, mut dropped) = (0.0f64, 0.0f64);
    for (s, d) in partials {
        total += s;
        dropped += d;
    }
    if total.to_bits() != sq.total_mass().to_bits()
        || dropped.to_bits() != sq.dropped_mass().to_bits()
    {
        return Err("mass totals differ from the replay".to_string());
    }
    for row in 0..n {
        for col in 0..n {
            for p in 0..n_bins {
                let s = ((row * n + col) * n_bins + p) * 3;
                let got = sq.at(row, col, p);
                if slots[s].to_bits() != got.w.to_bits()
                    || slots[s + 1].to_bits() != got.x.to_bits()
                    || slots[s + 2].to_bits() != got.y.to_bits()
                {
                    return Err(format!("slot ({row},{col},{p}) differs from the replay"));
                }
            }
        }
    }

    // Regrouping: sum over bins == weighted sum over kept scales.
    let mut worst = 0.0f64;
    for row in 0..n {
        for col in 0..n {
            let i = row * n + col;
            let mut direct = CliffordVector::ZERO;
            let mut kept = 0.0f64;
            for (j, layer) in stack.layers().iter().enumerate() {
                if est.valid(j)[i]
                    && bins
                        .index_of(est.omega1(j)[i].hypot(est.omega2(j)[i]))
                        .is_some()
                {
                    let w = LN_2 / nv as f64 / layer.scale;
                    let c = layer.coeff.at_flat(i);
                    direct += c * w;
                    kept += c.norm() * w;
                }
            }
            let err = (sq.sum_bins(row, col, 0, n_bins - 1) - direct).norm();
            if kept > 0.0 {
                worst = worst.max(err / kept);
            }
        }
    }
    if worst > 1e-12 {
        return Err(format!("regrouping error {worst:e}"));
    }
    Ok(format!(
        "replay bitwise equal ({} slots, both mass totals), regroup error {worst:.1e}",
        n * n * n_bins
    ))
}

/// Criterion 7: on the test signal, at least 95% of the squeezed mass in
/// the trimmed interior lies within 3 bins of one of the analytic
/// instantaneous frequencies.
fn criterion_7(big: &BigRun) -> Verdict {
    let n = 512usize;
    let margin = n / 8;
    let grid = GridSpec::new(n).unwrap();
    let grads = analytic_gradients(grid);
    let mags: Vec<ScalarField> = grads.iter().map(|g| g.magnitude()).collect();
    let bins = big.sq.bins();
    let n_bins = bins.len();

    let mut near_total = 0.0f64;
    let mut mass_total = 0.0f64;
    let mut ratios: Vec<f64> = Vec::with_capacity((n - 2 * margin) * (n - 2 * margin));
    for row in margin..n - margin {
        for col in margin..n - margin {
            let i = row * n + col;
            let targets: Vec<usize> = mags
                .iter()
                .filter_map(|m| bins.index_of(m.data()[i]))
                .collect();
            if targets.len() != 3 {
                return Err(format!("analytic frequency out of coverage at pixel {i}"));
            }
            let (mut near, mut total) = (0.0f64, 0.0f64);
            for p in 0..n_bins {
                let m = big.sq.at(row, col, p).norm();
                total += m;
                if targets.iter().any(|q| p.abs_diff(*q) <= 3) {
                    near += m;
                }
            }
            near_total += near;
            mass_total += total;
            if total > 0.0 {
                ratios.push(near / total);
            }
        }
    }
    let aggregate = near_total / mass_total;
    ratios.sort_by(f64::total_cmp);
    let p05 = ratios[ratios.len() / 20];
    let frac_095 = ratios.iter().filter(|r| **r >= 0.95).count() as f64 / ratios.len() as f64;
    let detail = format!(
        "interior mass within 3 bins: {:.2}% aggregate; {:.1}% of pixels individually >= 95%, 5th-percentile pixel ratio {:.3}",
        100.0 * aggregate,
        100.0 * frac_095,
        p05
    );
    if aggregate < 0.95 {
        return Err(detail);
    }
    Ok(detail)
}

/// Criterion 8: plane-wave demodulation recovers the amplitude within 3%
/// and the orientation within 1e-2 rad (mod pi) wherever the odd part is
/// conditioned.
fn criterion_8() -> Verdict {
    const A0: f64 = 0.9;
    let n = 128usize;
    let k = [2.0 * PI * 9.0, 2.0 * PI * 6.0];
    let theta0 = k[1].atan2(k[0]);
    let grid = GridSpec::new(n).unwrap();
    let f = plane_wave(grid, A0, k, 0.7);
    let spec = spec12();
    let sgrid = ScaleGrid::default_for(n, grid.dx(), spec.mu(), 16).unwrap();
    let (sq, _) = msst_pipeline(&f, &spec, &sgrid, GAMMA_REL_DEFAULT).unwrap();
    let ridges = extract_ridges(&sq, 1, 5).unwrap();
    let mode = reconstruct_mode(&sq, ridges.into_iter().next().unwrap(), 5).unwrap();

    let mut worst_amp = 0.0f64;
    let mut worst_theta = 0.0f64;
    let mut masked = 0usize;
    for i in 0..n * n {
        let vect = mode.clifford.ri().data()[i].hypot(mode.clifford.rj().data()[i]);
        if vect < 0.1 * A0 {
            continue;
        }
        masked += 1;
        worst_amp = worst_amp.max((mode.amplitude.data()[i] - A0).abs() / A0);
        let d = (mode.orientation.data()[i] - theta0).rem_euclid(PI);
        worst_theta = worst_theta.max(d.min(PI - d));
    }
    if masked < n * n / 4 {
        return Err(format!("conditioning mask kept only {masked} pixels"));
    }
    if worst_amp > 0.03 {
        return Err(format!("amplitude error {worst_amp:.4} exceeds 3%"));
    }
    if worst_theta > 1e-2 {
        return Err(format!("orientation error {worst_theta:.2e} exceeds 1e-2"));
    }
    Ok(format!(
        "amplitude within {:.2}%, orientation within {:.1e} rad on {masked} conditioned pixels",
        100.0 * worst_amp,
        worst_theta
    ))
}

/// Criterion 9: an oscillating pattern added to a smooth background is
/// extracted with trimmed MSE at most 0.2.
fn criterion_9() -> Verdict {
    let n = 128usize;
    let bg = smooth_background(n);
    let (composite, pattern) =
        compose_with_pattern(&bg, 1.0, [2.0 * PI * 12.0, 2.0 * PI * 7.0]).unwrap();
    let spec = spec12();
    let sgrid = ScaleGrid::default_for(n, 1.0 / n as f64, spec.mu(), 16).unwrap();
    let (sq, _) = msst_pipeline(&composite, &spec, &sgrid, GAMMA_REL_DEFAULT).unwrap();
    let ridges = extract_ridges(&sq, 2, 5).unwrap();
    let reference = trim_border(&pattern, 0.125).unwrap();
    let mut best = f64::INFINITY;
    for ridge in ridges {
        let mode = reconstruct_mode(&sq, ridge, 5).unwrap();
        let rec = trim_border(mode.clifford.re(), 0.125).unwrap();
        best = best.min(mse(&rec, &reference).unwrap());
    }
    if best > 0.2 {
        return Err(format!("best pattern MSE {best:.4} exceeds 0.2"));
    }
    Ok(format!("best pattern MSE {best:.4} (<= 0.2)"))
}

fn run(name: &str, f: impl FnOnce() -> Verdict + std::panic::UnwindSafe) -> bool {
    let verdict = catch_unwind(f).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(format!("panicked: {msg}"))
    });
    match verdict {
        Ok(detail) => {
            println!("PASS {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {name}: {detail}");
            false
        }
    }
}

#[test]
fn acceptance() {
    let big = catch_unwind(big_run);
    let mut ok = true;
    match &big {
        Ok(big) => {
            ok &= run("criterion-1", AssertUnwindSafe(|| criterion_1(big)));
        }
        Err(_) => {
            println!("FAIL criterion-1: full-size run panicked");
            ok = false;
        }
    }
    ok &= run("criterion-2", criterion_2);
    ok &= run("criterion-3", criterion_3);
    ok &= run("criterion-4", criterion_4);
    ok &= run("criterion-5", criterion_5);
    ok &= run("criterion-6", criterion_6);
    match &big {
        Ok(big) => {
            ok &= run("criterion-7", AssertUnwindSafe(|| criterion_7(big)));
        }
        Err(_) => {
            println!("FAIL criterion-7: full-size run panicked");
            ok = false;
        }
    }
    ok &= run("criterion-8", criterion_8);
    ok &= run("criterion-9", criterion_9);
    assert!(ok, "acceptance criteria failed; see the lines above");
}
