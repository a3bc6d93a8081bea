//! Reproducible sweeps over model systems and a toy relaxation walk.
//!
//! The Gibbs state of the harmonic oscillator stands in for "equilibrium"
//! here. Thermal rows at `T > 0` land strictly above the bound and are
//! reported as such. The relaxation walk is invented dynamics: a random
//! multiplicative contraction of the gap to the bound, nothing more.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{classify, entropy_surrogate, Verdict, DEFAULT_EPSILON};
use crate::density::FluctuationParams;
use crate::error::{FluctError, Result};
use crate::grid::GridSpec;
use crate::quantum::{
    ensemble_moments, oscillator_basis, phase_space_moments, thermal_ensemble_from_basis,
};
use crate::units::UnitSystem;

/// Highest eigenstate index an eigenstate sweep accepts.
pub const MAX_SWEEP_LEVEL: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub parameter: f64,
    pub product: f64,
    pub bound: f64,
    pub classification: Verdict,
    pub entropy_surrogate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub step: usize,
    pub product: f64,
    pub distance_to_bound: f64,
}

fn at(label: &'static str, parameter: f64) -> impl Fn(FluctError) -> FluctError {
    move |e| match e {
        // Already carries its own coordinate (e.g. the failing level n).
        e @ FluctError::AtParameter { .. } => e,
        e => FluctError::AtParameter {
            label,
            parameter,
            source: Box::new(e),
        },
    }
}

/// Moments of oscillator eigenstates `0..=n_max`.
pub fn eigenstate_sweep(
    n_max: usize,
    mass: f64,
    omega: f64,
    grid: &GridSpec,
    units: &UnitSystem,
) -> Result<Vec<SweepRow>> {
    if n_max > MAX_SWEEP_LEVEL {
        return Err(FluctError::InvalidArgument(format!(
            "n_max = {n_max} exceeds {MAX_SWEEP_LEVEL}"
        )));
    }
    let basis = oscillator_basis(n_max, mass, omega, grid, units)?;
    basis
        .par_iter()
        .enumerate()
        .map(|(n, state)| {
            let m = phase_space_moments(state, units).map_err(at("n", n as f64))?;
            let c = classify(&m, units, DEFAULT_EPSILON);
            Ok(SweepRow {
                label: "eigenstate".into(),
                parameter: n as f64,
                product: c.product,
                bound: c.bound,
                classification: c.verdict,
                entropy_surrogate: 0.0,
            })
        })
        .collect()
}

/// Truncated Gibbs states of the oscillator, one row per temperature.
pub fn thermal_sweep(
    temperatures: &[f64],
    mass: f64,
    omega: f64,
    n_max: usize,
    grid: &GridSpec,
    units: &UnitSystem,
) -> Result<Vec<SweepRow>> {
    let levels = if temperatures.iter().all(|t| *t == 0.0) {
        0
    } else {
        n_max
    };
    let basis = oscillator_basis(levels, mass, omega, grid, units)?;
    temperatures
        .par_iter()
        .map(|&t| {
            let ensemble =
                thermal_ensemble_from_basis(&basis, omega, t, n_max, units).map_err(at("T", t))?;
            let m = ensemble_moments(&ensemble, units).map_err(at("T", t))?;
            let c = classify(&m, units, DEFAULT_EPSILON);
            Ok(SweepRow {
                label: "thermal".into(),
                parameter: t,
                product: c.product,
                bound: c.bound,
                classification: c.verdict,
                entropy_surrogate: entropy_surrogate(&ensemble).value,
            })
        })
        .collect()
}

/// Toy relaxation: each step multiplies the gap `Δx·Δp − h/4π` by
/// `1 − step_size·u`, `u ~ U(0, 1)`, and projects back onto `product ≥ bound`.
/// The first trace point is the start.
pub fn relaxation_walk(
    start: &FluctuationParams,
    steps: usize,
    step_size: f64,
    seed: u64,
) -> Result<Vec<WalkTrace>> {
    if !(step_size > 0.0 && step_size < 0.5) {
        return Err(FluctError::InvalidArgument(format!(
            "step size {step_size} outside (0, 0.5)"
        )));
    }
    let bound = start.units().bound();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut product = start.product();
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(WalkTrace {
        step: 0,
        product,
        distance_to_bound: product - bound,
    });
    for step in 1..=steps {
        let u: f64 = rng.random();
        let gap = ((product - bound) * (1.0 - step_size * u)).max(0.0);
        product = (bound + gap).min(product);
        trace.push(WalkTrace {
            step,
            product,
            distance_to_bound: product - bound,
        });
    }
    Ok(trace)
}
