use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};
use crate::units::UnitSystem;

use super::params::{log_density, FluctuationParams, PhasePoint};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Bound on `|s·g′(s)/g(s)|` for a point to count as stationary.
pub const EXTREMUM_TOLERANCE: f64 = 1e-5;

fn separations(mean_x: f64, mean_p: f64, pt: PhasePoint) -> Result<(f64, f64)> {
    let dx = pt.x - mean_x;
    let dp = pt.p - mean_p;
    if dx == 0.0 {
        return Err(FluctError::ZeroSeparation { axis: "x" });
    }
    if dp == 0.0 {
        return Err(FluctError::ZeroSeparation { axis: "p" });
    }
    Ok((dx, dp))
}

/// Variances that keep the density at `pt` stationary when `var_p` is
/// tied to `var_x` by `var_x·var_p = (h/4π)²`:
///
/// ```text
/// var_x = (h/4π)·|x−⟨x⟩| / |p−⟨p⟩|,   var_p = (h/4π)·|p−⟨p⟩| / |x−⟨x⟩|
/// ```
pub fn extremal_variances(
    mean_x: f64,
    mean_p: f64,
    pt: PhasePoint,
    units: &UnitSystem,
) -> Result<(f64, f64)> {
    let (dx, dp) = separations(mean_x, mean_p, pt)?;
    let b = units.bound();
    let ratio = dx.abs() / dp.abs();
    Ok((b * ratio, b / ratio))
}

/// `Δx = Δp = ½·√(h/π)`, the equal split of the bound used at the means,
/// where the extremal variances are undefined.
pub fn degenerate_spread(units: &UnitSystem) -> (f64, f64) {
    let d = 0.5 * (units.h / PI).sqrt();
    (d, d)
}

/// `g(s)`: the density at `pt` with `var_x = s` and `var_p = (h/4π)²/s`.
pub fn constrained_density(
    mean_x: f64,
    mean_p: f64,
    pt: PhasePoint,
    s: f64,
    units: &UnitSystem,
) -> Result<f64> {
    constrained_log_density(mean_x, mean_p, pt, s, units).map(f64::exp)
}

fn constrained_log_density(
    mean_x: f64,
    mean_p: f64,
    pt: PhasePoint,
    s: f64,
    units: &UnitSystem,
) -> Result<f64> {
    let b = units.bound();
    let params = FluctuationParams::new(mean_x, mean_p, s, b * b / s, *units)?;
    Ok(log_density(&params, pt))
}

/// Finite-difference check of the extremum of `g` at the extremal `var_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumCheck {
    /// Candidate extremal `var_x`.
    pub s_star: f64,
    /// `g(s*)`; may underflow to zero far from the means.
    pub value: f64,
    /// `s*·g′(s*)/g(s*)`.
    pub first_derivative: f64,
    /// `s*²·g″(s*)/g(s*)`; same sign as `g″(s*)`.
    pub second_derivative: f64,
    pub is_max: bool,
}

/// Differentiates `g` numerically around `s*` and reports whether it is
/// a maximum.
///
/// Differences are taken in `t = ln(s/s*)` with step `fd_step`, on the
/// ratio `g(s)/g(s*)`, then converted back to derivatives in `s`.
pub fn verify_extremum(
    mean_x: f64,
    mean_p: f64,
    pt: PhasePoint,
    units: &UnitSystem,
    fd_step: f64,
) -> Result<ExtremumCheck> {
    if !(fd_step > 1e-8 && fd_step < 1e-1) {
        return Err(FluctError::InvalidStep(fd_step));
    }
    let (s_star, _) = extremal_variances(mean_x, mean_p, pt, units)?;
    let log_g = |s: f64| constrained_log_density(mean_x, mean_p, pt, s, units);
    let centre = log_g(s_star)?;
    let up = (log_g(s_star * fd_step.exp())? - centre).exp_m1();
    let down = (log_g(s_star * (-fd_step).exp())? - centre).exp_m1();

    // d/dt and d²/dt² of g/g(s*); s·g′ = dg/dt, s²·g″ = d²g/dt² − dg/dt.
    let d1 = (up - down) / (2.0 * fd_step);
    let d2 = (up + down) / (fd_step * fd_step);
    let first_derivative = d1;
    let second_derivative = d2 - d1;
    let is_max = first_derivative.abs() <= EXTREMUM_TOLERANCE && second_derivative < 0.0;
    Ok(ExtremumCheck {
        s_star,
        value: centre.exp(),
        first_derivative,
        second_derivative,
        is_max,
    })
}
