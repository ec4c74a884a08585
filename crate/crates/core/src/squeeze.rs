//! Synchrosqueezing: reallocation of monogenic wavelet coefficients from
//! the scale axis into local-frequency bins.
//!
//! Each valid coefficient c_F(a,b) contributes (ln 2/n_v)·c_F(a,b)/a, its
//! share of the measure da/a² on the dyadic grid, to the bin holding its
//! frequency estimate k_iso(a,b). Scales are always consumed in ascending
//! order and every bin slot is owned by exactly one pixel, so the result
//! is bitwise deterministic regardless of the parallel split. Coefficients
//! whose estimate falls outside the binned range are dropped and tallied,
//! never clamped into edge bins.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{pixel_freq, FrequencyEstimate};
use crate::field::{CliffordField, ScalarField};
use crate::quaternion::CliffordVector;
use crate::wavelet::{
    tilde_c_psi, warn_if_no_coverage, MultiplierEngine, ScaleGrid, ScaleStack, WaveletSpec,
};

/// Log-spaced frequency bin centers with geometric-midpoint edges.
///
/// Bin p owns the half-open interval [e_p, e_{p+1}) with
/// e_p = √(k_{p−1}·k_p); the outermost edges extend by the same log
/// half-step. Widths Δ_k = e_{p+1} − e_p therefore grow proportionally to
/// k, the edges tile [e_0, e_n] exactly, and membership is the nearest
/// center on the log axis.
#[derive(Clone, Debug)]
pub struct FrequencyBins {
    centers: Vec<f64>,
    edges: Vec<f64>,
}

impl FrequencyBins {
    pub fn new(centers: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::param("k_values", "at least one bin center"));
        }
        if !centers.iter().all(|k| k.is_finite() && *k > 0.0) {
            return Err(Error::param("k_values", "centers must be positive"));
        }
        if !centers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::param("k_values", "centers must strictly increase"));
        }
        // A single center gets a one-octave cell; otherwise the boundary
        // half-steps reuse the first and last center ratios.
        let n = centers.len();
        let mut edges = Vec::with_capacity(n + 1);
        let r_lo = if n > 1 {
            (centers[1] / centers[0]).sqrt()
        } else {
            std::f64::consts::SQRT_2
        };
        let r_hi = if n > 1 {
            (centers[n - 1] / centers[n - 2]).sqrt()
        } else {
            std::f64::consts::SQRT_2
        };
        edges.push(centers[0] / r_lo);
        for w in centers.windows(2) {
            edges.push((w[0] * w[1]).sqrt());
        }
        edges.push(centers[n - 1] * r_hi);
        Ok(Self { centers, edges })
    }

    /// Bins matched 1:1 to a scale grid: k = μ/a, ascending.
    pub fn from_scale_grid(grid: &ScaleGrid, mu: f64) -> Result<Self> {
        let mut centers: Vec<f64> = grid.scales().iter().rev().map(|a| mu / a).collect();
        // Guard against rounding producing equal neighbors at extreme n_v.
        centers.dedup();
        Self::new(centers)
    }

    /// `count` log-spaced centers spanning [k_min, k_max] inclusive.
    pub fn log_spaced(k_min: f64, k_max: f64, count: usize) -> Result<Self> {
        if !(k_min.is_finite() && k_min > 0.0 && k_max > k_min) {
            return Err(Error::param("k_range", "need 0 < k_min < k_max"));
        }
        if count < 2 {
            return Err(Error::param("count", "at least two bins"));
        }
        let step = (k_max / k_min).ln() / (count - 1) as f64;
        let centers = (0..count)
            .map(|i| k_min * (i as f64 * step).exp())
            .collect();
        Self::new(centers)
    }

    /// `count` evenly spaced centers spanning [k_min, k_max] inclusive,
    /// with arithmetic-midpoint edges, so every bin has the same width
    /// Δ_k and membership is the nearest center in plain distance. The
    /// first edge is clamped to stay positive when k_min < Δ_k/2.
    pub fn linear_spaced(k_min: f64, k_max: f64, count: usize) -> Result<Self> {
        if !(k_min.is_finite() && k_min > 0.0 && k_max > k_min) {
            return Err(Error::param("k_range", "need 0 < k_min < k_max"));
        }
        if count < 2 {
            return Err(Error::param("count", "at least two bins"));
        }
        let step = (k_max - k_min) / (count - 1) as f64;
        let centers: Vec<f64> = (0..count).map(|i| k_min + i as f64 * step).collect();
        let mut edges = Vec::with_capacity(count + 1);
        edges.push((k_min - step / 2.0).max(k_min / 2.0));
        for w in centers.windows(2) {
            edges.push((w[0] + w[1]) / 2.0);
        }
        edges.push(k_max + step / 2.0);
        Ok(Self { centers, edges })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one center
    }

    pub fn center(&self, p: usize) -> f64 {
        self.centers[p]
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Bin width Δ_k(p) = e_{p+1} − e_p.
    pub fn delta(&self, p: usize) -> f64 {
        self.edges[p + 1] - self.edges[p]
    }

    /// Lowest and highest covered frequency.
    pub fn span(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    /// Bin owning k, or `None` outside the tiled range.
    pub fn index_of(&self, k: f64) -> Option<usize> {
        // NaN fails the first comparison and falls outside like any
        // other uncovered frequency.
        let inside = k >= self.edges[0] && k < self.edges[self.edges.len() - 1];
        if !inside {
            return None;
        }
        // partition_point returns the count of edges <= k, so the owning
        // bin of [e_p, e_{p+1}) is that count minus one.
        Some(self.edges.partition_point(|e| *e <= k) - 1)
    }
}

/// Squeezed transform S_F(b, k): per pixel and frequency bin, the
/// Clifford-valued sum of reassigned coefficients. Storage is pixel-major
/// so one pixel's whole spectrum is contiguous.
#[derive(Clone, Debug)]
pub struct SqueezeStack {
    width: usize,
    height: usize,
    dx: f64,
    spec: WaveletSpec,
    n_voices: u32,
    gamma: f64,
    bins: FrequencyBins,
    data: Vec<f64>, // ((row·W + col)·n_bins + bin)·3 + component
    total_mass: f64,
    dropped_mass: f64,
}

impl SqueezeStack {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        dx: f64,
        spec: WaveletSpec,
        n_voices: u32,
        gamma: f64,
        bins: FrequencyBins,
        data: Vec<f64>,
        total_mass: f64,
        dropped_mass: f64,
    ) -> Result<Self> {
        if data.len() != width * height * bins.len() * 3 {
            return Err(Error::Geometry(format!(
                "squeeze payload holds {} values, geometry needs {}",
                data.len(),
                width * height * bins.len() * 3
            )));
        }
        Ok(Self {
            width,
            height,
            dx,
            spec,
            n_voices,
            gamma,
            bins,
            data,
            total_mass,
            dropped_mass,
        })
    }

    fn zeros(
        width: usize,
        height: usize,
        dx: f64,
        spec: WaveletSpec,
        n_voices: u32,
        gamma: f64,
        bins: FrequencyBins,
    ) -> Self {
        let data = vec![0.0; width * height * bins.len() * 3];
        Self {
            width,
            height,
            dx,
            spec,
            n_voices,
            gamma,
            bins,
            data,
            total_mass: 0.0,
            dropped_mass: 0.0,
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

    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }

    pub fn n_voices(&self) -> u32 {
        self.n_voices
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn bins(&self) -> &FrequencyBins {
        &self.bins
    }

    /// Mass (Σ |c|·weight) of all valid coefficients seen.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Mass of valid coefficients whose estimate missed every bin.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    pub fn dropped_mass_fraction(&self) -> f64 {
        if self.total_mass > 0.0 {
            self.dropped_mass / self.total_mass
        } else {
            0.0
        }
    }

    #[inline]
    fn slot(&self, row: usize, col: usize, bin: usize) -> usize {
        ((row * self.width + col) * self.bins.len() + bin) * 3
    }

    pub fn at(&self, row: usize, col: usize, bin: usize) -> CliffordVector {
        let s = self.slot(row, col, bin);
        CliffordVector::new(self.data[s], self.data[s + 1], self.data[s + 2])
    }

    /// Sum over an inclusive bin range at one pixel, ascending bin order.
    pub fn sum_bins(&self, row: usize, col: usize, lo: usize, hi: usize) -> CliffordVector {
        let mut acc = CliffordVector::ZERO;
        for p in lo..=hi.min(self.bins.len() - 1) {
            acc += self.at(row, col, p);
        }
        acc
    }

    /// One bin as a Clifford field.
    pub fn plane(&self, bin: usize) -> CliffordField {
        let len = self.width * self.height;
        let mut re = Vec::with_capacity(len);
        let mut ri = Vec::with_capacity(len);
        let mut rj = Vec::with_capacity(len);
        for px in 0..len {
            let s = (px * self.bins.len() + bin) * 3;
            re.push(self.data[s]);
            ri.push(self.data[s + 1]);
            rj.push(self.data[s + 2]);
        }
        CliffordField::new(
            ScalarField::from_vec_unchecked(self.width, self.height, self.dx, re),
            ScalarField::from_vec_unchecked(self.width, self.height, self.dx, ri),
            ScalarField::from_vec_unchecked(self.width, self.height, self.dx, rj),
        )
        .expect("planes share one geometry")
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

/// One scale's reassignment pass over every pixel. `freq` yields the
/// coefficient and its frequency estimate, or `None` below threshold.
/// Row-parallel; each row returns (seen, dropped) mass partials that the
/// caller folds in row order, keeping every tally order-fixed.
fn accumulate_layer<F>(
    data: &mut [f64],
    partials: &mut [(f64, f64)],
    width: usize,
    bins: &FrequencyBins,
    w_scale: f64,
    freq: F,
) where
    F: Fn(usize) -> Option<(CliffordVector, f64)> + Sync,
{
    let n_bins = bins.len();
    let row_len = width * n_bins * 3;
    data.par_chunks_mut(row_len)
        .zip(partials.par_iter_mut())
        .enumerate()
        .for_each(|(row, (row_data, tally))| {
            let mut seen = 0.0;
            let mut dropped = 0.0;
            for col in 0..width {
                let Some((c, k_iso)) = freq(row * width + col) else {
                    continue;
                };
                let mass = c.norm() * w_scale;
                seen += mass;
                match bins.index_of(k_iso) {
                    Some(p) => {
                        let s = (col * n_bins + p) * 3;
                        row_data[s] += w_scale * c.w;
                        row_data[s + 1] += w_scale * c.x;
                        row_data[s + 2] += w_scale * c.y;
                    }
                    None => dropped += mass,
                }
            }
            tally.0 += seen;
            tally.1 += dropped;
        });
}

fn weight(n_voices: u32, a: f64) -> f64 {
    std::f64::consts::LN_2 / n_voices as f64 / a
}

/// Isotropic synchrosqueezing of a materialized stack, keyed on the
/// precomputed signed frequency estimate.
pub fn msst_isotropic(
    stack: &ScaleStack,
    est: &FrequencyEstimate,
    bins: &FrequencyBins,
) -> Result<SqueezeStack> {
    if !est.is_signed() {
        return Err(Error::param("est", "signed_frequencies has not run"));
    }
    if est.width() != stack.width()
        || est.height() != stack.height()
        || est.n_scales() != stack.layers().len()
    {
        return Err(Error::Geometry(
            "estimate and stack shapes differ".to_string(),
        ));
    }
    let mut sq = SqueezeStack::zeros(
        stack.width(),
        stack.height(),
        stack.dx(),
        *stack.spec(),
        stack.grid().n_voices(),
        est.gamma(),
        bins.clone(),
    );
    let mut partials = vec![(0.0f64, 0.0f64); stack.height()];
    for (j, layer) in stack.layers().iter().enumerate() {
        let w_scale = weight(sq.n_voices, layer.scale);
        let (valid, o1, o2) = (est.valid(j), est.omega1(j), est.omega2(j));
        accumulate_layer(
            &mut sq.data,
            &mut partials,
            stack.width(),
            bins,
            w_scale,
            |i| {
                if valid[i] {
                    Some((layer.coeff.at_flat(i), o1[i].hypot(o2[i])))
                } else {
                    None
                }
            },
        );
    }
    for (seen, dropped) in partials {
        sq.total_mass += seen;
        sq.dropped_mass += dropped;
    }
    Ok(sq)
}

/// Diagnostics of a fused squeeze run.
#[derive(Clone, Copy, Debug)]
pub struct SqueezeDiagnostics {
    pub max_modulus: f64,
    pub gamma: f64,
    pub total_mass: f64,
    pub dropped_mass: f64,
}

/// Fused transform + estimate + squeeze without materializing the scale
/// stack: two streaming passes over the scale grid (one to find
/// max|c_F| for the relative threshold, one to reassign), peak memory one
/// squeeze stack plus one scale layer. Bitwise equal to the staged route
/// through [`crate::wavelet::monogenic_cwt`] and [`msst_isotropic`].
pub fn msst_pipeline(
    f: &ScalarField,
    spec: &WaveletSpec,
    grid: &ScaleGrid,
    gamma_rel: f64,
) -> Result<(SqueezeStack, SqueezeDiagnostics)> {
    let bins = FrequencyBins::from_scale_grid(grid, spec.mu())?;
    msst_pipeline_with_bins(f, spec, grid, gamma_rel, bins)
}

/// [`msst_pipeline`] with a caller-chosen frequency axis instead of the
/// scale-grid default.
pub fn msst_pipeline_with_bins(
    f: &ScalarField,
    spec: &WaveletSpec,
    grid: &ScaleGrid,
    gamma_rel: f64,
    bins: FrequencyBins,
) -> Result<(SqueezeStack, SqueezeDiagnostics)> {
    if !(gamma_rel.is_finite() && gamma_rel > 0.0) {
        return Err(Error::param("gamma_rel", "relative threshold must be positive"));
    }
    warn_if_no_coverage(f, spec, grid);
    let mut engine = MultiplierEngine::new(f);

    let mut max_sqr = 0.0f64;
    for a in grid.scales() {
        let coeff = engine.coeff_only(spec, a);
        for i in 0..coeff.re().len() {
            max_sqr = max_sqr.max(coeff.at_flat(i).norm_sqr());
        }
    }
    let max_modulus = max_sqr.sqrt();
    let gamma = gamma_rel * max_modulus;

    let mut sq = SqueezeStack::zeros(
        f.width(),
        f.height(),
        f.dx(),
        *spec,
        grid.n_voices(),
        gamma,
        bins,
    );
    let mut partials = vec![(0.0f64, 0.0f64); f.height()];
    for a in grid.scales() {
        let layer = engine.layer(spec, a);
        let w_scale = weight(sq.n_voices, a);
        accumulate_layer(
            &mut sq.data,
            &mut partials,
            f.width(),
            &sq.bins,
            w_scale,
            |i| pixel_freq(&layer, i, gamma).map(|p| (p.coeff, p.omega1.hypot(p.omega2))),
        );
    }
    for (seen, dropped) in partials {
        sq.total_mass += seen;
        sq.dropped_mass += dropped;
    }
    let diag = SqueezeDiagnostics {
        max_modulus,
        gamma,
        total_mass: sq.total_mass,
        dropped_mass: sq.dropped_mass,
    };
    Ok((sq, diag))
}

/// (2π/C̃_ψ)·Σ_k S_F(b,k) over every bin, ascending. With all bins kept
/// this equals the thresholded pointwise reconstruction: reassignment
/// only regroups the scale sum.
pub fn reconstruct_from_squeeze(sq: &SqueezeStack, spec: &WaveletSpec) -> Result<CliffordField> {
    let norm = 2.0 * std::f64::consts::PI / tilde_c_psi(spec)?;
    let len = sq.width * sq.height;
    let n_bins = sq.bins.len();
    let mut re = Vec::with_capacity(len);
    let mut ri = Vec::with_capacity(len);
    let mut rj = Vec::with_capacity(len);
    for px in 0..len {
        let mut acc = CliffordVector::ZERO;
        let base = px * n_bins * 3;
        for p in 0..n_bins {
            let s = base + p * 3;
            acc += CliffordVector::new(sq.data[s], sq.data[s + 1], sq.data[s + 2]);
        }
        re.push(norm * acc.w);
        ri.push(norm * acc.x);
        rj.push(norm * acc.y);
    }
    CliffordField::new(
        ScalarField::from_vec_unchecked(sq.width, sq.height, sq.dx, re),
        ScalarField::from_vec_unchecked(sq.width, sq.height, sq.dx, ri),
        ScalarField::from_vec_unchecked(sq.width, sq.height, sq.dx, rj),
    )
}

/// Orientation-resolved squeezing: cells indexed by (θ, k₁-bin, k₂-bin).
///
/// Membership is a partition: each valid coefficient goes to the
/// orientation in 𝒪 nearest (mod π) to its estimate θ̂ = atan2(ω₂, ω₁),
/// then its per-axis frequencies |Re(Λᵢ·conj(n_θ*))| pick one bin on each
/// positive axis, consistent with the folded orientation carrying the
/// sign information. Contributions missing either axis range are dropped
/// and tallied exactly like the isotropic path.
#[derive(Clone, Debug)]
pub struct DirectionalSqueeze {
    width: usize,
    height: usize,
    dx: f64,
    gamma: f64,
    orientations: Vec<f64>,
    bins1: FrequencyBins,
    bins2: FrequencyBins,
    data: Vec<f64>, // ((px·n_theta + q)·n1 + p1)·n2·3 + p2·3 + component
    total_mass: f64,
    dropped_mass: f64,
}

impl DirectionalSqueeze {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn orientations(&self) -> &[f64] {
        &self.orientations
    }

    pub fn bins1(&self) -> &FrequencyBins {
        &self.bins1
    }

    pub fn bins2(&self) -> &FrequencyBins {
        &self.bins2
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    #[inline]
    fn slot(&self, row: usize, col: usize, q: usize, p1: usize, p2: usize) -> usize {
        let px = row * self.width + col;
        (((px * self.orientations.len() + q) * self.bins1.len() + p1) * self.bins2.len() + p2) * 3
    }

    pub fn at(&self, row: usize, col: usize, q: usize, p1: usize, p2: usize) -> CliffordVector {
        let s = self.slot(row, col, q, p1, p2);
        CliffordVector::new(self.data[s], self.data[s + 1], self.data[s + 2])
    }

    /// Sum over all cells at one pixel (fixed ascending cell order).
    pub fn sum_cells(&self, row: usize, col: usize) -> CliffordVector {
        let cells = self.orientations.len() * self.bins1.len() * self.bins2.len();
        let base = (row * self.width + col) * cells * 3;
        let mut acc = CliffordVector::ZERO;
        for cell in 0..cells {
            let s = base + cell * 3;
            acc += CliffordVector::new(self.data[s], self.data[s + 1], self.data[s + 2]);
        }
        acc
    }
}

/// Angular distance modulo π, folded into [0, π/2].
fn orientation_distance(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut d = (a - b).rem_euclid(pi);
    if d > pi / 2.0 {
        d = pi - d;
    }
    d
}

pub fn msst_directional(
    stack: &ScaleStack,
    est: &FrequencyEstimate,
    bins1: &FrequencyBins,
    bins2: &FrequencyBins,
    orientations: &[f64],
    cell_budget: usize,
) -> Result<DirectionalSqueeze> {
    if !est.is_signed() {
        return Err(Error::param("est", "signed_frequencies has not run"));
    }
    if orientations.is_empty() {
        return Err(Error::param("orientations", "at least one orientation"));
    }
    let cells = orientations.len() * bins1.len() * bins2.len();
    if cells > cell_budget {
        return Err(Error::BinBudget {
            requested: cells,
            budget: cell_budget,
        });
    }
    let (width, height) = (stack.width(), stack.height());
    let mut out = DirectionalSqueeze {
        width,
        height,
        dx: stack.dx(),
        gamma: est.gamma(),
        orientations: orientations.to_vec(),
        bins1: bins1.clone(),
        bins2: bins2.clone(),
        data: vec![0.0; width * height * cells * 3],
        total_mass: 0.0,
        dropped_mass: 0.0,
    };
    for (j, layer) in stack.layers().iter().enumerate() {
        let w_scale = weight(stack.grid().n_voices(), layer.scale);
        let (valid, o1, o2) = (est.valid(j), est.omega1(j), est.omega2(j));
        let (l1, l2) = (est.lambda1(j), est.lambda2(j));
        for row in 0..height {
            for col in 0..width {
                let i = row * width + col;
                if !valid[i] {
                    continue;
                }
                let c = layer.coeff.at_flat(i);
                let mass = c.norm() * w_scale;
                out.total_mass += mass;
                let theta_hat = o2[i].atan2(o1[i]);
                let q = orientations
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        orientation_distance(theta_hat, **a)
                            .total_cmp(&orientation_distance(theta_hat, **b))
                    })
                    .map(|(q, _)| q)
                    .expect("orientation set is nonempty");
                let (sin_t, cos_t) = orientations[q].sin_cos();
                // Re(Lambda_i * conj(n_theta)) is the projection of the
                // vector part of Lambda_i onto n_theta.
                let r1 = (l1[i].x * cos_t + l1[i].y * sin_t).abs();
                let r2 = (l2[i].x * cos_t + l2[i].y * sin_t).abs();
                match (bins1.index_of(r1), bins2.index_of(r2)) {
                    (Some(p1), Some(p2)) => {
                        let s = out.slot(row, col, q, p1, p2);
                        out.data[s] += w_scale * c.w;
                        out.data[s + 1] += w_scale * c.x;
                        out.data[s + 2] += w_scale * c.y;
                    }
                    _ => out.dropped_mass += mass,
                }
            }
        }
    }
    Ok(out)
}
