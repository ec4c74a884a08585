//! Run configuration: defaults, TOML file form, and flag overrides.
//!
//! A config round-trips losslessly through its TOML form; every report
//! echoes the fully resolved config (defaults included) for provenance.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use msst::error::{Error, Result};
use msst::estimate::GAMMA_REL_DEFAULT;
use msst::squeeze::FrequencyBins;
use msst::wavelet::{ScaleGrid, WaveletSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Grid size for `synth` (the image side; inputs fix it elsewhere).
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub n_v: u32,
    /// Scale grid bounds; derived from the image geometry when absent.
    pub j_min: Option<i32>,
    pub j_max: Option<i32>,
    /// Coefficient threshold relative to max|c_F|.
    pub gamma_rel: f64,
    /// Explicit frequency-bin range; bins mirror the scale grid when absent.
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    /// Bin density for an explicit range; defaults to `n_v`.
    pub bins_per_octave: Option<u32>,
    pub n_modes: usize,
    /// Half-width, in bins, of the band peeled around each ridge.
    pub kappa_bins: usize,
    /// Refinement sweeps of the matching-pursuit decomposition (image
    /// input only; band peeling from a stored squeeze takes one pass).
    pub refine_sweeps: usize,
    /// Border fraction trimmed per side before MSE evaluation.
    pub trim: f64,
    pub directional: bool,
    /// Orientation count and per-axis bin count of the directional export.
    pub directional_orientations: usize,
    pub directional_axis_bins: usize,
    pub cell_budget: usize,
    /// Vertical position (fraction of height) of the `slice` row.
    pub slice_y: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 512,
            mu: 1.0,
            sigma: 2.0,
            n_v: 32,
            j_min: None,
            j_max: None,
            gamma_rel: GAMMA_REL_DEFAULT,
            k_min: None,
            k_max: None,
            bins_per_octave: None,
            n_modes: 3,
            kappa_bins: 5,
            refine_sweeps: 2,
            trim: 0.125,
            directional: false,
            directional_orientations: 4,
            directional_axis_bins: 8,
            cell_budget: 4096,
            slice_y: 0.5,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text)
            .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range checks with config-key names, so failures always report the
    /// offending key; the owning modules re-validate on construction.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, "must be positive and finite"))
            }
        };
        positive("mu", self.mu)?;
        positive("sigma", self.sigma)?;
        positive("gamma_rel", self.gamma_rel)?;
        if self.n_v < 1 {
            return Err(Error::param("n_v", "at least one voice per octave"));
        }
        if let (Some(lo), Some(hi)) = (self.j_min, self.j_max) {
            if lo > hi {
                return Err(Error::param("j_min", "exceeds j_max"));
            }
        }
        if self.j_min.is_some() != self.j_max.is_some() {
            return Err(Error::param("j_min", "j_min and j_max come as a pair"));
        }
        if self.k_min.is_some() != self.k_max.is_some() {
            return Err(Error::param("k_min", "k_min and k_max come as a pair"));
        }
        if let (Some(lo), Some(hi)) = (self.k_min, self.k_max) {
            positive("k_min", lo)?;
            positive("k_max", hi)?;
            if lo >= hi {
                return Err(Error::param("k_min", "must be below k_max"));
            }
        }
        if self.n_modes < 1 {
            return Err(Error::param("n_modes", "at least one mode"));
        }
        if !(self.trim.is_finite() && (0.0..0.5).contains(&self.trim)) {
            return Err(Error::param("trim", "must lie in [0, 0.5)"));
        }
        if !(self.slice_y.is_finite() && (0.0..1.0).contains(&self.slice_y)) {
            return Err(Error::param("slice_y", "must lie in [0, 1)"));
        }
        if self.directional_orientations < 1 {
            return Err(Error::param("directional_orientations", "at least one"));
        }
        if self.directional_axis_bins < 2 {
            return Err(Error::param("directional_axis_bins", "at least two"));
        }
        Ok(())
    }

    pub fn wavelet(&self) -> Result<WaveletSpec> {
        WaveletSpec::new(self.mu, self.sigma)
    }

    /// Scale grid for a given image: explicit j bounds when configured,
    /// otherwise the Nyquist-to-quarter-bandwidth default.
    pub fn scale_grid(&self, n: usize, dx: f64) -> Result<ScaleGrid> {
        match (self.j_min, self.j_max) {
            (Some(lo), Some(hi)) => ScaleGrid::new(self.n_v, lo, hi),
            _ => ScaleGrid::default_for(n, dx, self.mu, self.n_v),
        }
    }

    /// Explicit frequency bins when a range is configured; `None` means
    /// bins mirror the scale grid one to one.
    pub fn explicit_bins(&self) -> Result<Option<FrequencyBins>> {
        let (Some(lo), Some(hi)) = (self.k_min, self.k_max) else {
            return Ok(None);
        };
        let per_octave = self.bins_per_octave.unwrap_or(self.n_v) as f64;
        let count = ((per_octave * (hi / lo).log2()).floor() as usize + 1).max(2);
        FrequencyBins::log_spaced(lo, hi, count).map(Some)
    }
}
