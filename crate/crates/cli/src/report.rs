//! Machine-readable run reports.
//!
//! Every command writes `<out>/<command>_report.json` echoing the fully
//! resolved config and the wavelet constants, plus stage-specific fields.

use std::path::{Path, PathBuf};

use serde::Serialize;

use msst::error::Result;
use msst::wavelet::{c_psi, tilde_c_psi, WaveletSpec};

use crate::config::RunConfig;

#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub c_psi: f64,
    pub tilde_c_psi: f64,
    /// Files this command produced, relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeeze: Option<SqueezeReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_row: Option<usize>,
}

#[derive(Serialize)]
pub struct SqueezeReport {
    pub gamma: f64,
    pub total_mass: f64,
    pub dropped_mass: f64,
    pub dropped_mass_fraction: f64,
    pub n_bins: usize,
    pub n_scales: usize,
}

#[derive(Serialize)]
pub struct ModeReport {
    pub stem: String,
    /// Squeezed mass the ridge band captured when peeled.
    pub captured_mass: f64,
    /// Squared L2 norm of the reconstructed scalar part.
    pub energy: f64,
    pub low_energy: bool,
}

#[derive(Serialize)]
pub struct EvalReport {
    pub trim: f64,
    pub pairs: Vec<EvalPair>,
    pub total_mse: f64,
}

#[derive(Serialize)]
pub struct EvalPair {
    pub estimate: PathBuf,
    pub reference: PathBuf,
    pub mse: f64,
}

impl Report {
    pub fn new(command: &'static str, config: &RunConfig, spec: &WaveletSpec) -> Result<Self> {
        Ok(Self {
            command,
            config: config.clone(),
            c_psi: c_psi(spec)?,
            tilde_c_psi: tilde_c_psi(spec)?,
            outputs: Vec::new(),
            squeeze: None,
            modes: Vec::new(),
            eval: None,
            slice_row: None,
        })
    }

    pub fn push_output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    /// Writes `<out>/<command>_report.json` and logs the path.
    pub fn write(mut self, out: &Path) -> Result<()> {
        let name = format!("{}_report.json", self.command);
        self.outputs.push(name.clone());
        let path = out.join(name);
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        log::info!("report written to {}", path.display());
        Ok(())
    }
}
