//! Batch driver for the monogenic synchrosqueezing pipeline:
//! synthesize → transform → squeeze → extract → evaluate, plus CSV
//! exports. Commands communicate only via files, so stages can run as
//! independent processes; identical config and inputs give byte-identical
//! outputs.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "msst", version, about = "Monogenic synchrosqueezing toolkit")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Grid size for synth.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Wavelet center frequency.
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Wavelet bandwidth parameter.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Voices per octave.
    #[arg(long = "nv", global = true)]
    n_v: Option<u32>,
    /// Scale grid bounds (log2 scale times nv); both or neither.
    #[arg(long = "jmin", global = true, allow_hyphen_values = true)]
    j_min: Option<i32>,
    #[arg(long = "jmax", global = true, allow_hyphen_values = true)]
    j_max: Option<i32>,
    /// Coefficient threshold relative to max|c_F|.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Explicit frequency-bin range; both or neither.
    #[arg(long = "kmin", global = true)]
    k_min: Option<f64>,
    #[arg(long = "kmax", global = true)]
    k_max: Option<f64>,
    /// Number of modes to extract.
    #[arg(long = "modes", global = true)]
    n_modes: Option<usize>,
    /// Ridge band half-width in bins.
    #[arg(long = "kappa", global = true)]
    kappa_bins: Option<usize>,
    /// Refinement sweeps when extracting straight from an image.
    #[arg(long = "refine", global = true)]
    refine_sweeps: Option<usize>,
    /// Border fraction trimmed per side before MSE.
    #[arg(long, global = true)]
    trim: Option<f64>,
    /// Also export the directional squeeze aggregate.
    #[arg(long, global = true)]
    directional: bool,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident => $key:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$key = v; })*
            };
        }
        set!(n => n, mu => mu, sigma => sigma, n_v => n_v, gamma => gamma_rel,
             n_modes => n_modes, kappa_bins => kappa_bins,
             refine_sweeps => refine_sweeps, trim => trim);
        if self.j_min.is_some() {
            cfg.j_min = self.j_min;
        }
        if self.j_max.is_some() {
            cfg.j_max = self.j_max;
        }
        if self.k_min.is_some() {
            cfg.k_min = self.k_min;
        }
        if self.k_max.is_some() {
            cfg.k_max = self.k_max;
        }
        if self.directional {
            cfg.directional = true;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the three-component synthetic test signal and its parts.
    Synth,
    /// Monogenic wavelet transform of an image to a scale stack.
    Transform { input: PathBuf },
    /// Synchrosqueeze an image (fused) or a stored stack (staged).
    Squeeze { input: PathBuf },
    /// Decompose an image into modes (full matching pursuit), or peel
    /// ridge bands from a stored squeeze stack in one pass.
    Extract { input: PathBuf },
    /// Pair estimates with references by minimal total MSE after trim.
    Eval {
        /// Estimate field bases (scalar, or Clifford scalar part).
        #[arg(long = "est", required = true)]
        est: Vec<PathBuf>,
        /// Reference field bases, same count.
        #[arg(long = "refs", required = true)]
        refs: Vec<PathBuf>,
    },
    /// CSV of squeezed magnitude along one image row.
    Slice { input: PathBuf },
}

fn run(cli: &Cli) -> msst::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    cfg.validate()?;

    match &cli.command {
        Command::Synth => commands::cmd_synth(&cfg),
        Command::Transform { input } => commands::cmd_transform(&cfg, input),
        Command::Squeeze { input } => commands::cmd_squeeze(&cfg, input),
        Command::Extract { input } => commands::cmd_extract(&cfg, input),
        Command::Eval { est, refs } => commands::cmd_eval(&cfg, est, refs),
        Command::Slice { input } => commands::cmd_slice(&cfg, input),
    }
}

/// Config key or file path a failure points at, when it points anywhere.
fn error_key(e: &msst::Error) -> Option<String> {
    match e {
        msst::Error::InvalidParameter { name, .. } => Some((*name).to_string()),
        msst::Error::Format { path, .. } => Some(path.clone()),
        _ => None,
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        let msg = serde_json::json!({ "error": e.to_string(), "key": error_key(&e) });
        eprintln!("{msg}");
        std::process::exit(1);
    }
}
