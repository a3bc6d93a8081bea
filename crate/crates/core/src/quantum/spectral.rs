use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::GridSpec;
use crate::units::UnitSystem;

/// Momentum values `ħk` matching the output ordering of an unnormalized
/// forward DFT of length `grid.n` (non-negative frequencies first).
pub fn momentum_grid(grid: &GridSpec, units: &UnitSystem) -> Vec<f64> {
    let n = grid.n;
    let dk = 2.0 * PI / (n as f64 * grid.dx());
    let hbar = units.hbar();
    (0..n)
        .map(|m| {
            let signed = if m < n.div_ceil(2) {
                m as f64
            } else {
                m as f64 - n as f64
            };
            hbar * dk * signed
        })
        .collect()
}

pub(crate) fn forward(amplitudes: &[Complex64]) -> Vec<Complex64> {
    let mut buf = amplitudes.to_vec();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

pub(crate) fn inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    let n = buf.len() as f64;
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    for v in &mut buf {
        *v /= n;
    }
    buf
}

/// Momentum-space probabilities `|φ(p)|²`, normalized to sum to one.
pub(crate) fn momentum_probabilities(amplitudes: &[Complex64]) -> Vec<f64> {
    let spectrum = forward(amplitudes);
    let weights: Vec<f64> = spectrum.iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Applies `p²/2m` spectrally.
pub(crate) fn apply_kinetic(
    amplitudes: &[Complex64],
    grid: &GridSpec,
    mass: f64,
    units: &UnitSystem,
) -> Vec<Complex64> {
    let p = momentum_grid(grid, units);
    let mut spectrum = forward(amplitudes);
    for (c, pk) in spectrum.iter_mut().zip(&p) {
        *c *= pk * pk / (2.0 * mass);
    }
    inverse(&spectrum)
}
