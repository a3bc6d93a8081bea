//! Pure states, mixed ensembles and Hamiltonians on a uniform 1-D grid,
//! together with their position, momentum and energy moments.
//!
//! Position integrals use the trapezoid rule on the grid. Momentum
//! integrals go through a discrete Fourier transform of the amplitudes,
//! which is only meaningful when the state has decayed at both grid
//! edges; that requirement is the decay guard enforced by every
//! [`PureState`] constructor.

mod energy;
mod ensemble;
mod moments;
mod spectral;
mod state;

pub(crate) use energy::{combine_energy, member_energy_moments};
pub use energy::{
    energy_moments, ensemble_energy_moments, oscillator_basis, thermal_ensemble,
    thermal_ensemble_from_basis, thermal_tail_mass, EnergyMoments, HamiltonianSpec,
};
pub use ensemble::MixedEnsemble;
pub use moments::{ensemble_moments, phase_space_moments, MomentReport};
pub use spectral::momentum_grid;
pub use state::{
    build_state, hermite_functions, PureState, StateRecipe, DECAY_GUARD, NORM_TOLERANCE,
};

use crate::error::{FluctError, Result};

/// Variances within this distance below zero are floating-point
/// cancellation and are clamped to zero.
pub const NEGATIVE_VARIANCE_TOLERANCE: f64 = 1e-10;

pub(crate) fn clamp_variance(v: f64, what: &str) -> Result<f64> {
    if !v.is_finite() {
        return Err(FluctError::NumericalFailure(format!(
            "{what} is not finite ({v})"
        )));
    }
    if v >= 0.0 {
        Ok(v)
    } else if v > -NEGATIVE_VARIANCE_TOLERANCE {
        Ok(0.0)
    } else {
        Err(FluctError::NumericalFailure(format!(
            "{what} is negative ({v:e})"
        )))
    }
}
