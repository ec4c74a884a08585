//! Bidimensional monogenic synchrosqueezing.
//!
//! Decomposes a 2D image into AM-FM modes: the monogenic continuous
//! wavelet transform (Riesz-lifted, quaternion-valued) feeds per-scale
//! instantaneous-frequency estimates, coefficients are reallocated into
//! frequency bins (synchrosqueezing), ridges are extracted per mode, and
//! each mode is reconstructed and demodulated into amplitude, phase, and
//! local orientation.
//!
//! Pipeline: [`synth`] or file input → [`wavelet::monogenic_cwt`] →
//! [`estimate`] → [`squeeze`] → [`modes`].

pub mod error;
pub mod estimate;
pub mod field;
mod fft;
pub mod io;
pub mod modes;
pub mod quaternion;
pub mod squeeze;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
