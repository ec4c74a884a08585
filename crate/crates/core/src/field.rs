//! Uniform-grid fields, the 2D FFT contract, the Riesz transform, and
//! monogenic signal construction.
//!
//! All transforms assume torus topology (periodic boundaries); border
//! artifacts are handled downstream by trimming. Coordinates follow
//! x = column·dx (horizontal) and y = row·dx (vertical), with data stored
//! row-major. Fields are immutable after construction.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft;
use crate::quaternion::CliffordVector;

const MIN_DIM: usize = 8;

fn check_geometry(width: usize, height: usize, dx: f64) -> Result<()> {
    if width < MIN_DIM || height < MIN_DIM {
        return Err(Error::param("width/height", "dimensions must be at least 8"));
    }
    if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::param("width/height", "dimensions must be even"));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::param("dx", "grid spacing must be finite and positive"));
    }
    Ok(())
}

/// Real samples on a uniform 2D grid with physical spacing `dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    dx: f64,
    data: Vec<f64>,
}

impl ScalarField {
    /// Validates geometry (even dimensions ≥ 8, positive spacing) and
    /// finiteness of every sample.
    pub fn new(width: usize, height: usize, dx: f64, data: Vec<f64>) -> Result<Self> {
        check_geometry(width, height, dx)?;
        if data.len() != width * height {
            return Err(Error::Geometry(format!(
                "data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            dx,
            data,
        })
    }

    /// Samples `f(x, y)` at x = col·dx, y = row·dx.
    pub fn from_fn(
        width: usize,
        height: usize,
        dx: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        check_geometry(width, height, dx)?;
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            let y = r as f64 * dx;
            for c in 0..width {
                data.push(f(c as f64 * dx, y));
            }
        }
        Self::new(width, height, dx, data)
    }

    pub fn zeros(width: usize, height: usize, dx: f64) -> Result<Self> {
        check_geometry(width, height, dx)?;
        Ok(Self {
            width,
            height,
            dx,
            data: vec![0.0; width * height],
        })
    }

    /// Wraps values produced by internal numerics; geometry is already
    /// validated and finiteness is guaranteed by the producing operation.
    pub(crate) fn from_vec_unchecked(width: usize, height: usize, dx: f64, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            dx,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.dx == other.dx
    }

    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sample-mean of the field.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// New field with every sample passed through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.dx,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// New field combining samples of `self` and `other` pointwise.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_geometry(other) {
            return Err(Error::Geometry(
                "zip_with operands have different geometry".to_string(),
            ));
        }
        Self::new(
            self.width,
            self.height,
            self.dx,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

/// Complex samples with the same layout conventions as [`ScalarField`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    width: usize,
    height: usize,
    dx: f64,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(width: usize, height: usize, dx: f64, data: Vec<Complex64>) -> Result<Self> {
        check_geometry(width, height, dx)?;
        if data.len() != width * height {
            return Err(Error::Geometry(format!(
                "data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            dx,
            data,
        })
    }

    pub(crate) fn from_vec_unchecked(
        width: usize,
        height: usize,
        dx: f64,
        data: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            dx,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.width + col]
    }

    /// Scalar field of the real parts.
    pub fn real(&self) -> ScalarField {
        ScalarField::from_vec_unchecked(
            self.width,
            self.height,
            self.dx,
            self.data.iter().map(|v| v.re).collect(),
        )
    }

    /// Largest |Im| over the buffer, for residue checks.
    pub fn max_imag_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

/// Clifford-valued field: scalar part plus the two Riesz components.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordField {
    re: ScalarField,
    ri: ScalarField,
    rj: ScalarField,
}

impl CliffordField {
    pub fn new(re: ScalarField, ri: ScalarField, rj: ScalarField) -> Result<Self> {
        if !re.same_geometry(&ri) || !re.same_geometry(&rj) {
            return Err(Error::Geometry(
                "clifford components must share one geometry".into(),
            ));
        }
        Ok(Self { re, ri, rj })
    }

    pub fn zeros(width: usize, height: usize, dx: f64) -> Result<Self> {
        Ok(Self {
            re: ScalarField::zeros(width, height, dx)?,
            ri: ScalarField::zeros(width, height, dx)?,
            rj: ScalarField::zeros(width, height, dx)?,
        })
    }

    pub fn re(&self) -> &ScalarField {
        &self.re
    }

    pub fn ri(&self) -> &ScalarField {
        &self.ri
    }

    pub fn rj(&self) -> &ScalarField {
        &self.rj
    }

    pub fn width(&self) -> usize {
        self.re.width()
    }

    pub fn height(&self) -> usize {
        self.re.height()
    }

    pub fn dx(&self) -> f64 {
        self.re.dx()
    }

    pub fn at(&self, row: usize, col: usize) -> CliffordVector {
        CliffordVector::new(
            self.re.get(row, col),
            self.ri.get(row, col),
            self.rj.get(row, col),
        )
    }

    pub fn at_flat(&self, i: usize) -> CliffordVector {
        CliffordVector::new(self.re.data()[i], self.ri.data()[i], self.rj.data()[i])
    }

    /// Pointwise quaternion norm as a scalar field.
    pub fn magnitude(&self) -> ScalarField {
        let data = (0..self.re.len())
            .map(|i| self.at_flat(i).norm())
            .collect();
        ScalarField::from_vec_unchecked(self.width(), self.height(), self.dx(), data)
    }
}

/// Angular frequency coordinates of the FFT bins: ξᵢ = 2π·m/(Nᵢ·dx) with
/// the signed bin index m ∈ {−Nᵢ/2, …, Nᵢ/2−1}. ξ = 0 occupies exactly
/// one sample (DC), and the Nyquist row/column carries the
/// negative-frequency representative.
#[derive(Clone, Copy, Debug)]
pub struct FrequencyGrid {
    width: usize,
    height: usize,
    dx: f64,
}

impl FrequencyGrid {
    pub fn new(width: usize, height: usize, dx: f64) -> Self {
        Self { width, height, dx }
    }

    pub fn for_scalar(f: &ScalarField) -> Self {
        Self::new(f.width(), f.height(), f.dx())
    }

    fn signed_index(p: usize, n: usize) -> i64 {
        if p < n / 2 {
            p as i64
        } else {
            p as i64 - n as i64
        }
    }

    /// Horizontal angular frequency of column `col`.
    pub fn xi1(&self, col: usize) -> f64 {
        2.0 * std::f64::consts::PI * Self::signed_index(col, self.width) as f64
            / (self.width as f64 * self.dx)
    }

    /// Vertical angular frequency of row `row`.
    pub fn xi2(&self, row: usize) -> f64 {
        2.0 * std::f64::consts::PI * Self::signed_index(row, self.height) as f64
            / (self.height as f64 * self.dx)
    }

    /// Largest |ξ| on the grid (the corner of the Nyquist square).
    pub fn xi_max(&self) -> f64 {
        let x1 = std::f64::consts::PI / self.dx;
        let x2 = std::f64::consts::PI / self.dx;
        (x1 * x1 + x2 * x2).sqrt()
    }
}

/// Forward 2D FFT (unnormalized sums over samples).
pub fn fft2(f: &ScalarField) -> ComplexField {
    let mut data: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::fft2_inplace(&mut data, f.width(), f.height(), FftDirection::Forward);
    ComplexField::from_vec_unchecked(f.width(), f.height(), f.dx(), data)
}

/// Inverse 2D FFT with the 1/(N₁N₂) factor, so `ifft2(fft2(f)) = f`.
pub fn ifft2(g: &ComplexField) -> ComplexField {
    let mut data = g.data().to_vec();
    fft::fft2_inplace(&mut data, g.width(), g.height(), FftDirection::Inverse);
    let s = 1.0 / (g.width() * g.height()) as f64;
    for v in &mut data {
        *v *= s;
    }
    ComplexField::from_vec_unchecked(g.width(), g.height(), g.dx(), data)
}

/// Applies a Fourier multiplier to an already-transformed spectrum and
/// returns the real part of the inverse transform. The multiplier is
/// evaluated per bin as m(ξ₁, ξ₂).
pub(crate) fn multiplier_real(
    spectrum: &ComplexField,
    m: impl Fn(f64, f64) -> Complex64,
) -> ScalarField {
    let grid = FrequencyGrid::new(spectrum.width(), spectrum.height(), spectrum.dx());
    let mut data = Vec::with_capacity(spectrum.data().len());
    for r in 0..spectrum.height() {
        let xi2 = grid.xi2(r);
        for c in 0..spectrum.width() {
            data.push(spectrum.get(r, c) * m(grid.xi1(c), xi2));
        }
    }
    fft::fft2_inplace(
        &mut data,
        spectrum.width(),
        spectrum.height(),
        FftDirection::Inverse,
    );
    let s = 1.0 / (spectrum.width() * spectrum.height()) as f64;
    ScalarField::from_vec_unchecked(
        spectrum.width(),
        spectrum.height(),
        spectrum.dx(),
        data.iter().map(|v| v.re * s).collect(),
    )
}

/// Riesz transform (𝓡₁f, 𝓡₂f) via the Fourier multiplier −i·ξᵢ/|ξ|.
///
/// The DC bin is singular and set to 0, so constants map to zero. The
/// imaginary residue of the inverse transform carries the energy of the
/// self-conjugate Nyquist bins, where an antisymmetric multiplier cannot
/// produce a real field; it is discarded.
pub fn riesz(f: &ScalarField) -> (ScalarField, ScalarField) {
    let spectrum = fft2(f);
    let r1 = multiplier_real(&spectrum, |xi1, xi2| {
        let n = (xi1 * xi1 + xi2 * xi2).sqrt();
        if n == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -xi1 / n)
        }
    });
    let r2 = multiplier_real(&spectrum, |xi1, xi2| {
        let n = (xi1 * xi1 + xi2 * xi2).sqrt();
        if n == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -xi2 / n)
        }
    });
    (r1, r2)
}

/// Monogenic signal f + 𝓡₁f·i + 𝓡₂f·j.
pub fn monogenic(f: &ScalarField) -> CliffordField {
    let (r1, r2) = riesz(f);
    CliffordField {
        re: f.clone(),
        ri: r1,
        rj: r2,
    }
}

/// Exact 90° counterclockwise rotation of a square field about the origin
/// sample, as a permutation on the periodic grid: out(x, y) = in(y, −x).
pub fn rotate_ccw90(f: &ScalarField) -> Result<ScalarField> {
    if f.width() != f.height() {
        return Err(Error::param("field", "rotation requires a square grid"));
    }
    let n = f.width();
    let mut data = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            let src_row = (n - c) % n;
            let src_col = r;
            data[r * n + c] = f.data()[src_row * n + src_col];
        }
    }
    Ok(ScalarField::from_vec_unchecked(n, n, f.dx(), data))
}
