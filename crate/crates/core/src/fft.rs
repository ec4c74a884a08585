//! Internal 2D FFT passes on row-major complex buffers.
//!
//! Thin layer over rustfft: plans are cached process-wide, row passes run
//! in parallel, and the column pass is a row pass over a transpose. The
//! inverse here is unnormalized; callers divide by the sample count.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("FFT planner lock poisoned");
    planner.plan_fft(len, dir)
}

fn row_pass(data: &mut [Complex64], width: usize, dir: FftDirection) {
    let fft = plan(width, dir);
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(width).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(src: &[Complex64], width: usize, height: usize, dst: &mut [Complex64]) {
    for r in 0..height {
        for c in 0..width {
            dst[c * height + r] = src[r * width + c];
        }
    }
}

/// In-place 2D FFT of a `height` x `width` row-major buffer. The inverse
/// direction leaves the 1/(width*height) factor to the caller.
pub(crate) fn fft2_inplace(
    data: &mut [Complex64],
    width: usize,
    height: usize,
    dir: FftDirection,
) {
    debug_assert_eq!(data.len(), width * height);
    row_pass(data, width, dir);
    let mut t = vec![Complex64::default(); data.len()];
    transpose(data, width, height, &mut t);
    row_pass(&mut t, height, dir);
    transpose(&t, height, width, data);
}
