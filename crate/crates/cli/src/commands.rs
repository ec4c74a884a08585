//! Command implementations: each reads/writes the documented file
//! formats and drops a JSON report next to its outputs.

use std::path::{Path, PathBuf};

use msst::error::{Error, Result};
use msst::estimate::{lambda_fields, signed_frequencies};
use msst::field::ScalarField;
use msst::io;
use msst::modes::{decompose, extract_ridges, mse, reconstruct_mode, trim_border, ExtractedMode};
use msst::squeeze::{
    msst_directional, msst_isotropic, msst_pipeline, FrequencyBins, SqueezeStack,
};
use msst::synth::{test_signal_3comp, GridSpec};
use msst::wavelet::{monogenic_cwt, ScaleStack};

use crate::config::RunConfig;
use crate::report::{EvalPair, EvalReport, ModeReport, Report, SqueezeReport};

/// Creates the output directory and records the fully resolved config in
/// its file form, so any run can be replayed from its outputs alone.
fn ensure_out(cfg: &RunConfig) -> Result<&Path> {
    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(cfg.out.join("resolved_config.toml"), cfg.to_toml())?;
    Ok(&cfg.out)
}

/// Scalar input: a PGM image or a stored scalar field base.
fn load_image(path: &Path) -> Result<ScalarField> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        io::read_pgm(path)
    } else {
        io::read_scalar(path)
    }
}

/// Scalar estimate: a scalar field, or the scalar part of a stored
/// Clifford field (a reconstructed mode).
fn load_estimate(path: &Path) -> Result<ScalarField> {
    match io::read_field_components(path)? {
        1 => io::read_scalar(path),
        3 => Ok(io::read_clifford(path)?.re().clone()),
        c => Err(Error::format(
            path.display().to_string(),
            format!("expected a scalar or Clifford field, found {c} components"),
        )),
    }
}

pub fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out(cfg)?;
    let grid = GridSpec::new(cfg.n)?;
    let (signal, components) = test_signal_3comp(grid);
    let mut report = Report::new("synth", cfg, &cfg.wavelet()?)?;
    io::write_scalar(&out.join("signal"), &signal)?;
    report.push_output("signal");
    for (i, f) in components.iter().enumerate() {
        let stem = format!("f{}", i + 1);
        io::write_scalar(&out.join(&stem), f)?;
        report.push_output(stem);
    }
    report.write(out)
}

pub fn cmd_transform(cfg: &RunConfig, input: &Path) -> Result<()> {
    let out = ensure_out(cfg)?;
    let f = load_image(input)?;
    let spec = cfg.wavelet()?;
    let grid = cfg.scale_grid(f.width().min(f.height()), f.dx())?;
    log::info!(
        "transform: {}x{} image, {} scales",
        f.width(),
        f.height(),
        grid.len()
    );
    let stack = monogenic_cwt(&f, &spec, &grid)?;
    let mut report = Report::new("transform", cfg, &spec)?;
    io::write_scale_stack(&out.join("stack"), &stack)?;
    report.push_output("stack");
    report.write(out)
}

/// Staged squeeze from a materialized stack; shared by the stack-file
/// route and the in-memory routes that need the stack anyway.
fn squeeze_staged(cfg: &RunConfig, stack: &ScaleStack) -> Result<SqueezeStack> {
    let gamma = cfg.gamma_rel * stack.max_modulus();
    let est = signed_frequencies(lambda_fields(stack, gamma)?, stack)?;
    let bins = match cfg.explicit_bins()? {
        Some(bins) => bins,
        None => FrequencyBins::from_scale_grid(stack.grid(), stack.spec().mu())?,
    };
    msst_isotropic(stack, &est, &bins)
}

/// Aggregated mass per (orientation, k1, k2) cell of the directional
/// transform, as CSV for external plotting.
fn export_directional(cfg: &RunConfig, stack: &ScaleStack, out: &Path) -> Result<()> {
    use std::io::Write;

    let gamma = cfg.gamma_rel * stack.max_modulus();
    let est = signed_frequencies(lambda_fields(stack, gamma)?, stack)?;
    let iso = FrequencyBins::from_scale_grid(stack.grid(), stack.spec().mu())?;
    let centers = iso.centers();
    let axis = FrequencyBins::log_spaced(
        centers[0],
        centers[centers.len() - 1],
        cfg.directional_axis_bins,
    )?;
    let n_theta = cfg.directional_orientations;
    let orientations: Vec<f64> = (0..n_theta)
        .map(|q| q as f64 * std::f64::consts::PI / n_theta as f64)
        .collect();
    let dir = msst_directional(stack, &est, &axis, &axis, &orientations, cfg.cell_budget)?;

    let path = out.join("directional.csv");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(w, "theta,k1,k2,magnitude")?;
    for (q, theta) in orientations.iter().enumerate() {
        for p1 in 0..axis.len() {
            for p2 in 0..axis.len() {
                let mut total = 0.0;
                for row in 0..dir.height() {
                    for col in 0..dir.width() {
                        total += dir.at(row, col, q, p1, p2).norm();
                    }
                }
                writeln!(w, "{theta},{},{},{total}", axis.center(p1), axis.center(p2))?;
            }
        }
    }
    Ok(())
}

pub fn cmd_squeeze(cfg: &RunConfig, input: &Path) -> Result<()> {
    let out = ensure_out(cfg)?;
    let is_pgm = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let components = if is_pgm { 1 } else { io::read_field_components(input)? };

    let spec = cfg.wavelet()?;
    let needs_stack = cfg.directional || cfg.explicit_bins()?.is_some();
    let (sq, n_scales) = match components {
        // Image input: fused streaming unless the stack is needed anyway.
        1 => {
            let f = load_image(input)?;
            let grid = cfg.scale_grid(f.width().min(f.height()), f.dx())?;
            if needs_stack {
                let stack = monogenic_cwt(&f, &spec, &grid)?;
                let sq = squeeze_staged(cfg, &stack)?;
                if cfg.directional {
                    export_directional(cfg, &stack, out)?;
                }
                (sq, grid.len())
            } else {
                let (sq, diag) = msst_pipeline(&f, &spec, &grid, cfg.gamma_rel)?;
                log::info!("fused squeeze: max|c_F| = {}", diag.max_modulus);
                (sq, grid.len())
            }
        }
        // Stack input: staged from the file.
        9 => {
            let stack = io::read_scale_stack(input)?;
            let sq = squeeze_staged(cfg, &stack)?;
            if cfg.directional {
                export_directional(cfg, &stack, out)?;
            }
            (sq, stack.grid().len())
        }
        c => {
            return Err(Error::format(
                input.display().to_string(),
                format!("expected an image or a scale stack, found {c} components"),
            ))
        }
    };

    let mut report = Report::new("squeeze", cfg, sq.spec())?;
    report.squeeze = Some(SqueezeReport {
        gamma: sq.gamma(),
        total_mass: sq.total_mass(),
        dropped_mass: sq.dropped_mass(),
        dropped_mass_fraction: sq.dropped_mass_fraction(),
        n_bins: sq.bins().len(),
        n_scales,
    });
    io::write_squeeze(&out.join("squeeze"), &sq)?;
    report.push_output("squeeze");
    if cfg.directional {
        report.push_output("directional.csv");
    }
    report.write(out)
}

/// Writes each mode's field set and its report row.
fn write_modes(report: &mut Report, out: &Path, modes: Vec<ExtractedMode>) -> Result<()> {
    for (i, mode) in modes.into_iter().enumerate() {
        let stem = format!("mode_{}", i + 1);
        if mode.ridge.low_energy() {
            log::warn!("{stem}: ridge captured almost no mass");
        }
        io::write_mode(out, &stem, &mode)?;
        report.modes.push(ModeReport {
            energy: mode.clifford.re().l2_norm().powi(2),
            captured_mass: mode.ridge.captured_mass(),
            low_energy: mode.ridge.low_energy(),
            stem: stem.clone(),
        });
        report.push_output(stem);
    }
    Ok(())
}

pub fn cmd_extract(cfg: &RunConfig, input: &Path) -> Result<()> {
    let out = ensure_out(cfg)?;
    // A stored squeeze gets one band-peeling pass; an image gets the full
    // matching-pursuit decomposition with refinement sweeps.
    let (spec, modes) = if io::is_squeeze(input) {
        let sq = io::read_squeeze(input)?;
        let ridges = extract_ridges(&sq, cfg.n_modes, cfg.kappa_bins)?;
        let modes = ridges
            .into_iter()
            .map(|r| reconstruct_mode(&sq, r, cfg.kappa_bins))
            .collect::<Result<Vec<_>>>()?;
        (*sq.spec(), modes)
    } else {
        let f = load_image(input)?;
        let spec = cfg.wavelet()?;
        let grid = cfg.scale_grid(f.width().min(f.height()), f.dx())?;
        log::info!(
            "decompose: {} modes, {} refinement sweeps",
            cfg.n_modes,
            cfg.refine_sweeps
        );
        let modes = decompose(
            &f,
            &spec,
            &grid,
            cfg.gamma_rel,
            cfg.n_modes,
            cfg.kappa_bins,
            cfg.refine_sweeps,
        )?;
        (spec, modes)
    };
    let mut report = Report::new("extract", cfg, &spec)?;
    write_modes(&mut report, out, modes)?;
    report.write(out)
}

/// Assignment of estimates to references minimizing total MSE, brute
/// force over permutations (mode counts are single digits).
fn best_pairing(mses: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = mses.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (perm.clone(), f64::INFINITY);
    fn visit(perm: &mut Vec<usize>, k: usize, mses: &[Vec<f64>], best: &mut (Vec<usize>, f64)) {
        if k == perm.len() {
            let total: f64 = perm.iter().enumerate().map(|(r, e)| mses[*e][r]).sum();
            if total < best.1 {
                *best = (perm.clone(), total);
            }
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            visit(perm, k + 1, mses, best);
            perm.swap(k, i);
        }
    }
    visit(&mut perm, 0, mses, &mut best);
    best
}

pub fn cmd_eval(cfg: &RunConfig, est: &[PathBuf], refs: &[PathBuf]) -> Result<()> {
    let out = ensure_out(cfg)?;
    if est.len() != refs.len() {
        return Err(Error::param("est", "estimate and reference counts differ"));
    }
    if !(1..=8).contains(&est.len()) {
        return Err(Error::param("est", "between 1 and 8 estimates"));
    }
    let trimmed = |p: &PathBuf| -> Result<ScalarField> { trim_border(&load_estimate(p)?, cfg.trim) };
    let est_fields = est.iter().map(trimmed).collect::<Result<Vec<_>>>()?;
    let ref_fields = refs.iter().map(trimmed).collect::<Result<Vec<_>>>()?;

    let mut mses = vec![vec![0.0; refs.len()]; est.len()];
    for (e, ef) in est_fields.iter().enumerate() {
        for (r, rf) in ref_fields.iter().enumerate() {
            mses[e][r] = mse(ef, rf)?;
        }
    }
    let (perm, total_mse) = best_pairing(&mses);
    let pairs = perm
        .iter()
        .enumerate()
        .map(|(r, e)| EvalPair {
            estimate: est[*e].clone(),
            reference: refs[r].clone(),
            mse: mses[*e][r],
        })
        .collect();

    let mut report = Report::new("eval", cfg, &cfg.wavelet()?)?;
    report.eval = Some(EvalReport {
        trim: cfg.trim,
        pairs,
        total_mse,
    });
    report.write(out)
}

pub fn cmd_slice(cfg: &RunConfig, input: &Path) -> Result<()> {
    let out = ensure_out(cfg)?;
    let sq = io::read_squeeze(input)?;
    let row = ((cfg.slice_y * sq.height() as f64).floor() as usize).min(sq.height() - 1);
    io::write_slice_csv(&out.join("slice.csv"), &sq, row)?;
    let mut report = Report::new("slice", cfg, sq.spec())?;
    report.slice_row = Some(row);
    report.push_output("slice.csv");
    report.write(out)
}
