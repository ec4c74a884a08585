//! Generators for the synthetic evaluation signals.
//!
//! Everything here is a pure function of the grid and the parameters, so
//! outputs are bit-identical across runs. Coordinates follow the crate
//! convention x = column·dx, y = row·dx on the unit square.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Square N×N sampling of [0,1)² with dx = 1/N.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    /// N must be even and at least 64; smaller grids cannot carry the
    /// multiscale pipeline.
    pub fn new(n: usize) -> Result<Self> {
        if n < 64 || !n.is_multiple_of(2) {
            return Err(Error::param("n", "grid size must be even and at least 64"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Samples A₀·cos(k·x + α). Wavevectors with components that are integer
/// multiples of 2π are periodic on the grid and usable as exact oracles.
pub fn plane_wave(grid: GridSpec, a0: f64, k: [f64; 2], alpha: f64) -> ScalarField {
    ScalarField::from_fn(grid.n, grid.n, grid.dx(), |x, y| {
        a0 * (k[0] * x + k[1] * y + alpha).cos()
    })
    .expect("grid spec is valid by construction")
}

/// The three-component AM-FM test signal: a Gaussian-windowed radial
/// chirp, a pure plane wave, and a quadratic-phase sweep. Returns the sum
/// together with the individual components for per-mode evaluation.
pub fn test_signal_3comp(grid: GridSpec) -> (ScalarField, [ScalarField; 3]) {
    let n = grid.n;
    let dx = grid.dx();
    let pi = std::f64::consts::PI;
    let f1 = ScalarField::from_fn(n, n, dx, |x, y| {
        let r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
        (-10.0 * r2).exp() * (10.0 * pi * (x * x + y * y + 2.0 * (x + 0.2 * y))).sin()
    })
    .expect("valid grid");
    let f2 = ScalarField::from_fn(n, n, dx, |x, y| 1.2 * (40.0 * pi * (x + y)).sin())
        .expect("valid grid");
    let f3 = ScalarField::from_fn(n, n, dx, |x, y| {
        (2.0 * pi * (70.0 * x + 20.0 * x * x + 50.0 * y - 20.0 * y * y - 41.0 * x * y)).cos()
    })
    .expect("valid grid");
    let sum = ScalarField::new(
        n,
        n,
        dx,
        f1.data()
            .iter()
            .zip(f2.data())
            .zip(f3.data())
            .map(|((a, b), c)| a + b + c)
            .collect(),
    )
    .expect("sum of finite fields");
    (sum, [f1, f2, f3])
}

/// Phase gradient ∇φ sampled on the grid, in rad per domain unit.
#[derive(Clone, Debug)]
pub struct PhaseGradient {
    pub g1: ScalarField,
    pub g2: ScalarField,
}

impl PhaseGradient {
    /// |∇φ| per pixel.
    pub fn magnitude(&self) -> ScalarField {
        ScalarField::new(
            self.g1.width(),
            self.g1.height(),
            self.g1.dx(),
            self.g1
                .data()
                .iter()
                .zip(self.g2.data())
                .map(|(a, b)| (a * a + b * b).sqrt())
                .collect(),
        )
        .expect("finite gradient components")
    }
}

/// Closed-form gradients of the three test-signal phases:
/// ∇φ₁ = 10π(2x+2, 2y+0.4), ∇φ₂ = 40π(1, 1),
/// ∇φ₃ = 2π(70+40x−41y, 50−40y−41x).
pub fn analytic_gradients(grid: GridSpec) -> [PhaseGradient; 3] {
    let n = grid.n;
    let dx = grid.dx();
    let pi = std::f64::consts::PI;
    fn grad(
        n: usize,
        dx: f64,
        g1: impl Fn(f64, f64) -> f64,
        g2: impl Fn(f64, f64) -> f64,
    ) -> PhaseGradient {
        PhaseGradient {
            g1: ScalarField::from_fn(n, n, dx, g1).expect("valid grid"),
            g2: ScalarField::from_fn(n, n, dx, g2).expect("valid grid"),
        }
    }
    let pi10 = 10.0 * pi;
    let pi40 = 40.0 * pi;
    let pi2 = 2.0 * pi;
    [
        grad(
            n,
            dx,
            |x, _| pi10 * (2.0 * x + 2.0),
            |_, y| pi10 * (2.0 * y + 0.4),
        ),
        grad(n, dx, |_, _| pi40, |_, _| pi40),
        grad(
            n,
            dx,
            |x, y| pi2 * (70.0 + 40.0 * x - 41.0 * y),
            |x, y| pi2 * (50.0 - 40.0 * y - 41.0 * x),
        ),
    ]
}

/// Adds an oscillating pattern a₀·cos(k·x) to an image; returns the
/// composite and the pattern itself as the extraction reference.
pub fn compose_with_pattern(
    image: &ScalarField,
    a0: f64,
    k: [f64; 2],
) -> Result<(ScalarField, ScalarField)> {
    let pattern = ScalarField::from_fn(image.width(), image.height(), image.dx(), |x, y| {
        a0 * (k[0] * x + k[1] * y).cos()
    })?;
    let composite = ScalarField::new(
        image.width(),
        image.height(),
        image.dx(),
        image
            .data()
            .iter()
            .zip(pattern.data())
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    Ok((composite, pattern))
}
