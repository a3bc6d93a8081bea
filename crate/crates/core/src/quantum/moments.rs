use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};
use crate::units::UnitSystem;

use super::clamp_variance;
use super::ensemble::MixedEnsemble;
use super::spectral::{momentum_grid, momentum_probabilities};
use super::state::PureState;

/// Means and mean-square deviations of position and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
}

impl MomentReport {
    /// Builds a report from raw numbers, e.g. for auditing externally
    /// computed moments. Variances must be finite and non-negative.
    pub fn new(mean_x: f64, mean_p: f64, var_x: f64, var_p: f64) -> Result<Self> {
        if !(mean_x.is_finite() && mean_p.is_finite()) {
            return Err(FluctError::NumericalFailure("means must be finite".into()));
        }
        for (name, v) in [("var_x", var_x), ("var_p", var_p)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(FluctError::NumericalFailure(format!(
                    "{name} = {v} is not a variance"
                )));
            }
        }
        Ok(MomentReport {
            mean_x,
            mean_p,
            var_x,
            var_p,
        })
    }

    /// `Δx·Δp`.
    pub fn product(&self) -> f64 {
        (self.var_x * self.var_p).sqrt()
    }
}

fn weighted_mean_and_variance(values: &[f64], weights: &[f64]) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (v - mean).powi(2) * w)
        .sum::<f64>()
        / total;
    (mean, var)
}

/// Position moments by trapezoid quadrature of `|ψ|²`; momentum moments
/// from the discrete Fourier transform of the amplitudes.
pub fn phase_space_moments(state: &PureState, units: &UnitSystem) -> Result<MomentReport> {
    units.validate()?;
    let grid = state.grid();
    let density = state.probability_density();
    let norm = grid.trapezoid(&density);
    let xs: Vec<f64> = grid.points().collect();
    let first: Vec<f64> = xs.iter().zip(&density).map(|(x, d)| x * d).collect();
    let mean_x = grid.trapezoid(&first) / norm;
    let second: Vec<f64> = xs
        .iter()
        .zip(&density)
        .map(|(x, d)| (x - mean_x).powi(2) * d)
        .collect();
    let var_x = grid.trapezoid(&second) / norm;

    let probs = momentum_probabilities(state.amplitudes());
    let (mean_p, var_p) = weighted_mean_and_variance(&momentum_grid(grid, units), &probs);

    MomentReport::new(
        mean_x,
        mean_p,
        clamp_variance(var_x, "var_x")?,
        clamp_variance(var_p, "var_p")?,
    )
}

/// Weighted-trace moments of a mixture. Variances are taken about the
/// ensemble mean, i.e. `Σρ_i [var_i + (mean_i − mean)²]`.
pub fn ensemble_moments(ensemble: &MixedEnsemble, units: &UnitSystem) -> Result<MomentReport> {
    let members = ensemble
        .members()
        .iter()
        .map(|m| phase_space_moments(m, units))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(ensemble.weights(), &members))
}

pub(crate) fn combine(weights: &[f64], members: &[MomentReport]) -> MomentReport {
    let mean_x: f64 = weights.iter().zip(members).map(|(w, m)| w * m.mean_x).sum();
    let mean_p: f64 = weights.iter().zip(members).map(|(w, m)| w * m.mean_p).sum();
    let var_x: f64 = weights
        .iter()
        .zip(members)
        .map(|(w, m)| w * (m.var_x + (m.mean_x - mean_x).powi(2)))
        .sum();
    let var_p: f64 = weights
        .iter()
        .zip(members)
        .map(|(w, m)| w * (m.var_p + (m.mean_p - mean_p).powi(2)))
        .sum();
    MomentReport {
        mean_x,
        mean_p,
        var_x,
        var_p,
    }
}
