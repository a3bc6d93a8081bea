//! Gaussian phase-space fluctuation densities: evaluation, peak value,
//! constrained extremization of the variances, the reduced closed form
//! obtained by substituting the extremal variances back in, sampling and
//! quadrature checks.
//!
//! The same types serve a single state and a whole ensemble; the formulas
//! are identical at both levels.

mod extremum;
mod params;
mod quadrature;
mod sampling;

pub use extremum::{
    constrained_density, degenerate_spread, extremal_variances, verify_extremum, ExtremumCheck,
    DEFAULT_FD_STEP, EXTREMUM_TOLERANCE,
};
pub use params::{
    density_eval, log_density, peak_value, reduced_density, FluctuationParams, PhasePoint,
};
pub use quadrature::{
    density_scan, gauss_legendre, normalization_check, reduced_box_integral, NORMALIZATION_MESH,
};
pub use sampling::sample;
