//! File formats.
//!
//! Every field is stored as a raw little-endian f64 payload `<base>.f64`
//! (row-major, components concatenated: re, then ri, then rj for Clifford
//! fields) next to a JSON sidecar `<base>.json` describing the geometry.
//! Scale stacks concatenate nine planes per scale (coefficient re/ri/rj,
//! then the two derivative fields in the same component order), ascending
//! in scale; squeeze stacks concatenate three planes per frequency bin,
//! ascending in frequency. PGM (P5, 8- or 16-bit) images are accepted on
//! input and rescaled to [0, 1] on a unit-width domain (dx = 1/width).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::FrequencyEstimate;
use crate::field::{CliffordField, ScalarField};
use crate::modes::ExtractedMode;
use crate::squeeze::{FrequencyBins, SqueezeStack};
use crate::wavelet::{ScaleGrid, ScaleLayer, ScaleStack, WaveletSpec};

const DTYPE: &str = "f64le";
const ORDER: &str = "row-major";

fn payload_path(base: &Path) -> PathBuf {
    base.with_extension("f64")
}

fn sidecar_path(base: &Path) -> PathBuf {
    base.with_extension("json")
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::format(path.display().to_string(), reason)
}

fn write_f64s(w: &mut impl Write, data: &[f64]) -> Result<()> {
    let mut buf = [0u8; 8192];
    for chunk in data.chunks(1024) {
        for (i, v) in chunk.iter().enumerate() {
            buf[i * 8..(i + 1) * 8].copy_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf[..chunk.len() * 8])?;
    }
    Ok(())
}

fn read_f64s(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != expected * 8 {
        return Err(bad(
            path,
            format!("payload holds {} bytes, geometry needs {}", bytes.len(), expected * 8),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let mut s = String::new();
    File::open(path)?.read_to_string(&mut s)?;
    serde_json::from_str(&s).map_err(|e| bad(path, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct FieldHeader {
    width: usize,
    height: usize,
    dx: f64,
    components: u8,
    dtype: String,
    order: String,
}

impl FieldHeader {
    fn new(width: usize, height: usize, dx: f64, components: u8) -> Self {
        Self {
            width,
            height,
            dx,
            components,
            dtype: DTYPE.to_string(),
            order: ORDER.to_string(),
        }
    }

    fn validate(&self, path: &Path, components: u8) -> Result<()> {
        if self.dtype != DTYPE {
            return Err(bad(path, format!("dtype is `{}`, expected `{DTYPE}`", self.dtype)));
        }
        if self.order != ORDER {
            return Err(bad(path, format!("order is `{}`, expected `{ORDER}`", self.order)));
        }
        if self.components != components {
            return Err(bad(
                path,
                format!("components is {}, expected {components}", self.components),
            ));
        }
        Ok(())
    }
}

/// True when the base path holds a serialized squeeze stack; its sidecar
/// is the only one carrying the frequency axis. Lets callers dispatch
/// between squeeze and plain field inputs.
pub fn is_squeeze(base: &Path) -> bool {
    read_json::<serde_json::Value>(&sidecar_path(base))
        .ok()
        .is_some_and(|v| v.get("k_values").is_some())
}

/// Component count recorded in a field sidecar: 1 for scalar fields,
/// 3 for Clifford fields, 9 for scale stacks. Lets callers dispatch on
/// what a base path holds without parsing the full header.
pub fn read_field_components(base: &Path) -> Result<u8> {
    let sidecar = sidecar_path(base);
    let v: serde_json::Value = read_json(&sidecar)?;
    v.get("components")
        .and_then(|c| c.as_u64())
        .map(|c| c as u8)
        .ok_or_else(|| bad(&sidecar, "missing components field"))
}

/// Writes `<base>.f64` and `<base>.json` for a scalar field.
pub fn write_scalar(base: &Path, f: &ScalarField) -> Result<()> {
    write_json(
        &sidecar_path(base),
        &FieldHeader::new(f.width(), f.height(), f.dx(), 1),
    )?;
    let mut w = BufWriter::new(File::create(payload_path(base))?);
    write_f64s(&mut w, f.data())?;
    Ok(())
}

pub fn read_scalar(base: &Path) -> Result<ScalarField> {
    let sidecar = sidecar_path(base);
    let h: FieldHeader = read_json(&sidecar)?;
    h.validate(&sidecar, 1)?;
    let data = read_f64s(&payload_path(base), h.width * h.height)?;
    ScalarField::new(h.width, h.height, h.dx, data)
}

pub fn write_clifford(base: &Path, f: &CliffordField) -> Result<()> {
    write_json(
        &sidecar_path(base),
        &FieldHeader::new(f.width(), f.height(), f.dx(), 3),
    )?;
    let mut w = BufWriter::new(File::create(payload_path(base))?);
    write_f64s(&mut w, f.re().data())?;
    write_f64s(&mut w, f.ri().data())?;
    write_f64s(&mut w, f.rj().data())?;
    Ok(())
}

pub fn read_clifford(base: &Path) -> Result<CliffordField> {
    let sidecar = sidecar_path(base);
    let h: FieldHeader = read_json(&sidecar)?;
    h.validate(&sidecar, 3)?;
    let len = h.width * h.height;
    let data = read_f64s(&payload_path(base), 3 * len)?;
    CliffordField::new(
        ScalarField::new(h.width, h.height, h.dx, data[..len].to_vec())?,
        ScalarField::new(h.width, h.height, h.dx, data[len..2 * len].to_vec())?,
        ScalarField::new(h.width, h.height, h.dx, data[2 * len..].to_vec())?,
    )
}

/// Binary PGM (P5) input, 8- or 16-bit, rescaled to [0, 1].
pub fn read_pgm(path: &Path) -> Result<ScalarField> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;

    // Header: "P5", width, height, maxval as whitespace-separated tokens,
    // with '#' comments running to end of line; one whitespace byte then
    // the raster.
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad(path, "truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if token(&bytes)? != "P5" {
        return Err(bad(path, "not a binary PGM (missing P5 magic)"));
    }
    let parse = |t: String| -> Result<usize> {
        t.parse::<usize>()
            .map_err(|_| bad(path, format!("non-numeric header token `{t}`")))
    };
    let width = parse(token(&bytes)?)?;
    let height = parse(token(&bytes)?)?;
    let maxval = parse(token(&bytes)?)?;
    if !(1..=65535).contains(&maxval) {
        return Err(bad(path, format!("maxval {maxval} outside [1, 65535]")));
    }
    pos += 1; // single whitespace separating header from raster

    let wide = maxval > 255;
    let sample_bytes = if wide { 2 } else { 1 };
    let need = width * height * sample_bytes;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| bad(path, "raster shorter than geometry requires"))?;
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = if wide {
        // 16-bit PGM samples are big-endian.
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    } else {
        raster.iter().map(|b| *b as f64 * scale).collect()
    };
    ScalarField::new(width, height, 1.0 / width as f64, data)
}

#[derive(Serialize, Deserialize)]
struct StackHeader {
    width: usize,
    height: usize,
    dx: f64,
    components: u8,
    dtype: String,
    order: String,
    scales: Vec<f64>,
    mu: f64,
    sigma: f64,
    n_v: u32,
    j_min: i32,
}

/// Serializes a scale stack: nine planes per scale, ascending scales.
pub fn write_scale_stack(base: &Path, stack: &ScaleStack) -> Result<()> {
    let header = StackHeader {
        width: stack.width(),
        height: stack.height(),
        dx: stack.dx(),
        components: 9,
        dtype: DTYPE.to_string(),
        order: ORDER.to_string(),
        scales: stack.grid().scales(),
        mu: stack.spec().mu(),
        sigma: stack.spec().sigma(),
        n_v: stack.grid().n_voices(),
        j_min: stack.grid().j_min(),
    };
    write_json(&sidecar_path(base), &header)?;
    let mut w = BufWriter::new(File::create(payload_path(base))?);
    for layer in stack.layers() {
        for field in [&layer.coeff, &layer.db1, &layer.db2] {
            write_f64s(&mut w, field.re().data())?;
            write_f64s(&mut w, field.ri().data())?;
            write_f64s(&mut w, field.rj().data())?;
        }
    }
    Ok(())
}

pub fn read_scale_stack(base: &Path) -> Result<ScaleStack> {
    let sidecar = sidecar_path(base);
    let h: StackHeader = read_json(&sidecar)?;
    if h.components != 9 {
        return Err(bad(&sidecar, format!("components is {}, expected 9", h.components)));
    }
    if h.dtype != DTYPE || h.order != ORDER {
        return Err(bad(&sidecar, "dtype/order mismatch"));
    }
    let spec = WaveletSpec::new(h.mu, h.sigma)?;
    let n_scales = h.scales.len();
    if n_scales == 0 {
        return Err(Error::EmptyScaleGrid);
    }
    let grid = ScaleGrid::new(h.n_v, h.j_min, h.j_min + n_scales as i32 - 1)?;
    let len = h.width * h.height;
    let data = read_f64s(&payload_path(base), 9 * len * n_scales)?;
    let mut layers = Vec::with_capacity(n_scales);
    let mut off = 0usize;
    let mut next_plane = |data: &[f64]| -> Result<ScalarField> {
        let plane = ScalarField::new(h.width, h.height, h.dx, data[off..off + len].to_vec())?;
        off += len;
        Ok(plane)
    };
    for idx in 0..n_scales {
        let mut fields = Vec::with_capacity(3);
        for _ in 0..3 {
            let re = next_plane(&data)?;
            let ri = next_plane(&data)?;
            let rj = next_plane(&data)?;
            fields.push(CliffordField::new(re, ri, rj)?);
        }
        let db2 = fields.pop().expect("three fields");
        let db1 = fields.pop().expect("three fields");
        let coeff = fields.pop().expect("three fields");
        layers.push(ScaleLayer {
            scale: grid.scale(idx),
            coeff,
            db1,
            db2,
        });
    }
    Ok(ScaleStack::from_layers(spec, grid, layers))
}

#[derive(Serialize, Deserialize)]
struct SqueezeHeader {
    width: usize,
    height: usize,
    dx: f64,
    components: u8,
    dtype: String,
    order: String,
    k_values: Vec<f64>,
    gamma: f64,
    mu: f64,
    sigma: f64,
    n_v: u32,
    total_mass: f64,
    dropped_mass: f64,
}

/// Serializes a squeeze stack: three planes per frequency bin, ascending.
pub fn write_squeeze(base: &Path, sq: &SqueezeStack) -> Result<()> {
    let header = SqueezeHeader {
        width: sq.width(),
        height: sq.height(),
        dx: sq.dx(),
        components: 3,
        dtype: DTYPE.to_string(),
        order: ORDER.to_string(),
        k_values: sq.bins().centers().to_vec(),
        gamma: sq.gamma(),
        mu: sq.spec().mu(),
        sigma: sq.spec().sigma(),
        n_v: sq.n_voices(),
        total_mass: sq.total_mass(),
        dropped_mass: sq.dropped_mass(),
    };
    write_json(&sidecar_path(base), &header)?;
    let mut w = BufWriter::new(File::create(payload_path(base))?);
    let len = sq.width() * sq.height();
    let n_bins = sq.bins().len();
    let data = sq.data();
    let mut plane = vec![0.0f64; len];
    for p in 0..n_bins {
        for comp in 0..3 {
            for (px, dst) in plane.iter_mut().enumerate() {
                *dst = data[(px * n_bins + p) * 3 + comp];
            }
            write_f64s(&mut w, &plane)?;
        }
    }
    Ok(())
}

pub fn read_squeeze(base: &Path) -> Result<SqueezeStack> {
    let sidecar = sidecar_path(base);
    let h: SqueezeHeader = read_json(&sidecar)?;
    if h.components != 3 {
        return Err(bad(&sidecar, format!("components is {}, expected 3", h.components)));
    }
    if h.dtype != DTYPE || h.order != ORDER {
        return Err(bad(&sidecar, "dtype/order mismatch"));
    }
    let bins = FrequencyBins::new(h.k_values)?;
    let len = h.width * h.height;
    let n_bins = bins.len();
    let planes = read_f64s(&payload_path(base), 3 * len * n_bins)?;
    let mut data = vec![0.0f64; len * n_bins * 3];
    for p in 0..n_bins {
        for comp in 0..3 {
            let src = &planes[(p * 3 + comp) * len..(p * 3 + comp + 1) * len];
            for (px, v) in src.iter().enumerate() {
                data[(px * n_bins + p) * 3 + comp] = *v;
            }
        }
    }
    SqueezeStack::from_parts(
        h.width,
        h.height,
        h.dx,
        WaveletSpec::new(h.mu, h.sigma)?,
        h.n_v,
        h.gamma,
        bins,
        data,
        h.total_mass,
        h.dropped_mass,
    )
}

/// Writes the field set of one extracted mode: `<stem>_clifford`,
/// `<stem>_amplitude`, `<stem>_phase`, `<stem>_orientation`,
/// `<stem>_ridge` under `dir`.
pub fn write_mode(dir: &Path, stem: &str, mode: &ExtractedMode) -> Result<()> {
    write_clifford(&dir.join(format!("{stem}_clifford")), &mode.clifford)?;
    write_scalar(&dir.join(format!("{stem}_amplitude")), &mode.amplitude)?;
    write_scalar(&dir.join(format!("{stem}_phase")), &mode.phase)?;
    write_scalar(&dir.join(format!("{stem}_orientation")), &mode.orientation)?;
    write_scalar(&dir.join(format!("{stem}_ridge")), mode.ridge.k_hat())?;
    Ok(())
}

/// CSV of (x, k, |S_F|) along one image row: the frequency profile under
/// each column position.
pub fn write_slice_csv(path: &Path, sq: &SqueezeStack, row: usize) -> Result<()> {
    if row >= sq.height() {
        return Err(Error::param("row", "outside the image"));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,k,magnitude")?;
    for col in 0..sq.width() {
        let x = col as f64 * sq.dx();
        for p in 0..sq.bins().len() {
            writeln!(w, "{x},{},{}", sq.bins().center(p), sq.at(row, col, p).norm())?;
        }
    }
    Ok(())
}

/// CSV of (b1, b2, a, k_iso, theta, coeff_modulus) for every valid entry
/// of a signed frequency estimate.
pub fn write_estimate_csv(
    path: &Path,
    stack: &ScaleStack,
    est: &FrequencyEstimate,
) -> Result<()> {
    if !est.is_signed() {
        return Err(Error::param("est", "signed_frequencies has not run"));
    }
    if est.width() != stack.width() || est.height() != stack.height() {
        return Err(Error::Geometry(
            "estimate and stack shapes differ".to_string(),
        ));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "b1,b2,a,k_iso,theta,coeff_modulus")?;
    let dx = stack.dx();
    for (j, layer) in stack.layers().iter().enumerate() {
        for row in 0..stack.height() {
            for col in 0..stack.width() {
                let i = row * stack.width() + col;
                if est.valid(j)[i] {
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        col as f64 * dx,
                        row as f64 * dx,
                        layer.scale,
                        est.k_iso_at(j, i),
                        est.theta_at(j, i),
                        layer.coeff.at_flat(i).norm(),
                    )?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{default_gamma, lambda_fields, signed_frequencies};
    use crate::squeeze::msst_isotropic;
    use crate::synth::{plane_wave, GridSpec};
    use crate::wavelet::monogenic_cwt;
    use std::f64::consts::PI;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().expect("temp dir")
    }

    #[test]
    fn scalar_field_roundtrips_bitwise() {
        let dir = tmp();
        let f = ScalarField::from_fn(16, 8, 0.25, |x, y| (x * 3.1).sin() + y).unwrap();
        let base = dir.path().join("field");
        write_scalar(&base, &f).unwrap();
        let g = read_scalar(&base).unwrap();
        assert_eq!((g.width(), g.height(), g.dx()), (16, 8, 0.25));
        for (a, b) in f.data().iter().zip(g.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // Sidecar carries the documented keys.
        let json = std::fs::read_to_string(base.with_extension("json")).unwrap();
        for key in ["\"width\"", "\"height\"", "\"dx\"", "\"components\"", "\"dtype\"", "\"order\""] {
            assert!(json.contains(key), "sidecar is missing {key}");
        }
        assert!(json.contains("\"f64le\""));
    }

    #[test]
    fn clifford_field_roundtrips_bitwise() {
        let dir = tmp();
        let re = ScalarField::from_fn(8, 8, 1.0, |x, y| x + y).unwrap();
        let ri = ScalarField::from_fn(8, 8, 1.0, |x, y| x - y).unwrap();
        let rj = ScalarField::from_fn(8, 8, 1.0, |x, y| x * y + 0.5).unwrap();
        let f = CliffordField::new(re, ri, rj).unwrap();
        let base = dir.path().join("cliff");
        write_clifford(&base, &f).unwrap();
        let g = read_clifford(&base).unwrap();
        for i in 0..f.re().len() {
            assert_eq!(f.at_flat(i), g.at_flat(i));
        }
    }

    #[test]
    fn reading_rejects_wrong_sizes_and_headers() {
        let dir = tmp();
        let f = ScalarField::from_fn(8, 8, 1.0, |x, _| x).unwrap();
        let base = dir.path().join("field");
        write_scalar(&base, &f).unwrap();

        // Truncated payload.
        let payload = std::fs::read(base.with_extension("f64")).unwrap();
        std::fs::write(base.with_extension("f64"), &payload[..payload.len() - 8]).unwrap();
        assert!(matches!(read_scalar(&base), Err(Error::Format { .. })));

        // Component mismatch: a scalar sidecar read as Clifford.
        std::fs::write(base.with_extension("f64"), &payload).unwrap();
        assert!(matches!(read_clifford(&base), Err(Error::Format { .. })));

        // Corrupt JSON.
        std::fs::write(base.with_extension("json"), b"{ not json").unwrap();
        assert!(matches!(read_scalar(&base), Err(Error::Format { .. })));
    }

    #[test]
    fn pgm_8bit_parses_with_comments() {
        let dir = tmp();
        let path = dir.path().join("img.pgm");
        let mut bytes = b"P5 # binary pgm\n# a comment line\n8 8\n255\n".to_vec();
        bytes.extend((0..64u32).map(|i| (i * 4) as u8));
        std::fs::write(&path, &bytes).unwrap();
        let f = read_pgm(&path).unwrap();
        assert_eq!((f.width(), f.height()), (8, 8));
        assert_eq!(f.dx(), 1.0 / 8.0);
        assert_eq!(f.get(0, 0), 0.0);
        assert!((f.get(0, 1) - 4.0 / 255.0).abs() < 1e-15);
        assert!((f.get(7, 7) - 252.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn pgm_16bit_is_big_endian() {
        let dir = tmp();
        let path = dir.path().join("img16.pgm");
        let mut bytes = b"P5\n8 8\n65535\n".to_vec();
        for i in 0..64u32 {
            let v = (i * 1000) as u16;
            bytes.extend(v.to_be_bytes());
        }
        std::fs::write(&path, &bytes).unwrap();
        let f = read_pgm(&path).unwrap();
        assert!((f.get(0, 1) - 1000.0 / 65535.0).abs() < 1e-15);
        assert!((f.get(7, 7) - 63000.0 / 65535.0).abs() < 1e-15);
    }

    #[test]
    fn pgm_rejects_garbage() {
        let dir = tmp();
        let path = dir.path().join("bad.pgm");
        std::fs::write(&path, b"P6\n8 8\n255\n").unwrap();
        assert!(read_pgm(&path).is_err());
        std::fs::write(&path, b"P5\n8 8\n255\n").unwrap(); // no raster
        assert!(read_pgm(&path).is_err());
        std::fs::write(&path, b"P5\n8 eight\n255\n").unwrap();
        assert!(read_pgm(&path).is_err());
    }

    fn sample_stack() -> ScaleStack {
        let grid = GridSpec::new(64).unwrap();
        let f = plane_wave(grid, 1.0, [2.0 * PI * 6.0, -2.0 * PI * 3.0], 0.2);
        let spec = WaveletSpec::new(1.0, 2.0).unwrap();
        let sgrid = ScaleGrid::new(4, -22, -15).unwrap();
        monogenic_cwt(&f, &spec, &sgrid).unwrap()
    }

    #[test]
    fn scale_stack_roundtrips_bitwise() {
        let dir = tmp();
        let stack = sample_stack();
        let base = dir.path().join("stack");
        write_scale_stack(&base, &stack).unwrap();
        let back = read_scale_stack(&base).unwrap();
        assert_eq!(back.grid(), stack.grid());
        assert_eq!(back.spec(), stack.spec());
        assert_eq!(back.layers().len(), stack.layers().len());
        for (a, b) in stack.layers().iter().zip(back.layers()) {
            assert_eq!(a.scale.to_bits(), b.scale.to_bits());
            for i in 0..a.coeff.re().len() {
                assert_eq!(a.coeff.at_flat(i), b.coeff.at_flat(i));
                assert_eq!(a.db1.at_flat(i), b.db1.at_flat(i));
                assert_eq!(a.db2.at_flat(i), b.db2.at_flat(i));
            }
        }
    }

    #[test]
    fn squeeze_stack_roundtrips_bitwise() {
        let dir = tmp();
        let stack = sample_stack();
        let gamma = default_gamma(stack.max_modulus());
        let est = signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();
        let bins = FrequencyBins::from_scale_grid(stack.grid(), stack.spec().mu()).unwrap();
        let sq = msst_isotropic(&stack, &est, &bins).unwrap();
        let base = dir.path().join("squeeze");
        write_squeeze(&base, &sq).unwrap();
        let back = read_squeeze(&base).unwrap();
        assert_eq!(back.bins().centers(), sq.bins().centers());
        assert_eq!(back.gamma().to_bits(), sq.gamma().to_bits());
        assert_eq!(back.total_mass().to_bits(), sq.total_mass().to_bits());
        assert_eq!(back.data().len(), sq.data().len());
        for (a, b) in sq.data().iter().zip(back.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn slice_csv_has_one_row_per_column_bin_pair() {
        let dir = tmp();
        let stack = sample_stack();
        let gamma = default_gamma(stack.max_modulus());
        let est = signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();
        let bins = FrequencyBins::from_scale_grid(stack.grid(), stack.spec().mu()).unwrap();
        let sq = msst_isotropic(&stack, &est, &bins).unwrap();
        let path = dir.path().join("slice.csv");
        write_slice_csv(&path, &sq, 32).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,k,magnitude"));
        assert_eq!(lines.count(), sq.width() * sq.bins().len());
        assert!(write_slice_csv(&path, &sq, 64).is_err());
    }

    #[test]
    fn estimate_csv_lists_valid_entries() {
        let dir = tmp();
        let stack = sample_stack();
        let gamma = default_gamma(stack.max_modulus());
        let est = signed_frequencies(lambda_fields(&stack, gamma).unwrap(), &stack).unwrap();
        let n_valid: usize = (0..est.n_scales())
            .map(|j| est.valid(j).iter().filter(|v| **v).count())
            .sum();
        let path = dir.path().join("est.csv");
        write_estimate_csv(&path, &stack, &est).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), n_valid + 1);
        assert!(text.starts_with("b1,b2,a,k_iso,theta,coeff_modulus"));
    }
}
