use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};

/// Planck constant in working units. The default `h = 2π` gives `ħ = 1`
/// and an uncertainty bound `h/4π = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub h: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { h: 2.0 * PI }
    }
}

impl UnitSystem {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(FluctError::InvalidUnits(format!(
                "h must be finite and > 0, got {h}"
            )));
        }
        Ok(UnitSystem { h })
    }

    pub fn hbar(&self) -> f64 {
        self.h / (2.0 * PI)
    }

    /// Lower bound `h/4π` on the product of standard deviations `Δx·Δp`.
    pub fn bound(&self) -> f64 {
        self.h / (4.0 * PI)
    }

    pub fn validate(&self) -> Result<()> {
        UnitSystem::new(self.h).map(|_| ())
    }
}
