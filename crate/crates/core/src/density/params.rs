use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};
use crate::quantum::MomentReport;
use crate::units::UnitSystem;

/// Relative slack allowed below `(h/4π)²` for admissible variance pairs.
pub const ADMISSIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        PhasePoint { x, p }
    }
}

/// Means and variances of an uncorrelated Gaussian over `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationParams {
    mean_x: f64,
    mean_p: f64,
    var_x: f64,
    var_p: f64,
    units: UnitSystem,
}

impl FluctuationParams {
    pub fn new(
        mean_x: f64,
        mean_p: f64,
        var_x: f64,
        var_p: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        units.validate()?;
        if !(mean_x.is_finite() && mean_p.is_finite()) {
            return Err(FluctError::InadmissibleParams(
                "means must be finite".into(),
            ));
        }
        for (name, v) in [("var_x", var_x), ("var_p", var_p)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FluctError::InadmissibleParams(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        let floor = units.bound().powi(2) * (1.0 - ADMISSIBILITY_SLACK);
        if var_x * var_p < floor {
            return Err(FluctError::InadmissibleParams(format!(
                "var_x·var_p = {:e} is below (h/4π)² = {:e}",
                var_x * var_p,
                units.bound().powi(2)
            )));
        }
        Ok(FluctuationParams {
            mean_x,
            mean_p,
            var_x,
            var_p,
            units,
        })
    }

    pub fn from_moments(m: &MomentReport, units: UnitSystem) -> Result<Self> {
        FluctuationParams::new(m.mean_x, m.mean_p, m.var_x, m.var_p, units)
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }
    pub fn mean_p(&self) -> f64 {
        self.mean_p
    }
    pub fn var_x(&self) -> f64 {
        self.var_x
    }
    pub fn var_p(&self) -> f64 {
        self.var_p
    }
    pub fn units(&self) -> UnitSystem {
        self.units
    }

    pub fn sd_x(&self) -> f64 {
        self.var_x.sqrt()
    }
    pub fn sd_p(&self) -> f64 {
        self.var_p.sqrt()
    }

    /// `Δx·Δp`.
    pub fn product(&self) -> f64 {
        (self.var_x * self.var_p).sqrt()
    }
}

/// `1/(2πΔxΔp) · exp(−½[(x−⟨x⟩)²/Δx² + (p−⟨p⟩)²/Δp²])`.
pub fn density_eval(params: &FluctuationParams, pt: PhasePoint) -> f64 {
    let dx = pt.x - params.mean_x;
    let dp = pt.p - params.mean_p;
    let exponent = -0.5 * (dx * dx / params.var_x + dp * dp / params.var_p);
    exponent.exp() / (2.0 * PI * params.product())
}

/// Natural log of [`density_eval`]; finite where the density underflows.
pub fn log_density(params: &FluctuationParams, pt: PhasePoint) -> f64 {
    let dx = pt.x - params.mean_x;
    let dp = pt.p - params.mean_p;
    -(2.0 * PI * params.product()).ln() - 0.5 * (dx * dx / params.var_x + dp * dp / params.var_p)
}

/// Density at the means, `1/(2πΔxΔp)`.
pub fn peak_value(params: &FluctuationParams) -> f64 {
    1.0 / (2.0 * PI * params.product())
}

/// `(2/h) · exp(−(4π/h)·|(x−⟨x⟩)(p−⟨p⟩)|)`, the Gaussian density with the
/// extremal variances substituted in. Defined everywhere.
pub fn reduced_density(mean_x: f64, mean_p: f64, pt: PhasePoint, units: &UnitSystem) -> f64 {
    let h = units.h;
    let area = ((pt.x - mean_x) * (pt.p - mean_p)).abs();
    (2.0 / h) * (-(4.0 * PI / h) * area).exp()
}
