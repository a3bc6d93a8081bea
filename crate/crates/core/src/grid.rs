use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};

/// Uniform 1-D grid. Samples sit at `x_min + j·dx` for `j = 0..n`, with
/// `dx = (x_max - x_min)/n`, so the right endpoint is the periodic image
/// of the left one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

pub const MIN_POINTS: usize = 8;

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let g = GridSpec { x_min, x_max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(FluctError::InvalidGrid("bounds must be finite".into()));
        }
        if self.x_max <= self.x_min {
            return Err(FluctError::InvalidGrid(format!(
                "x_max ({}) must exceed x_min ({})",
                self.x_max, self.x_min
            )));
        }
        if self.n < MIN_POINTS {
            return Err(FluctError::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dx = self.dx();
        (0..self.n).map(move |j| self.x_min + j as f64 * dx)
    }

    /// Trapezoid rule over the sampled points.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        trapezoid(values, self.dx())
    }
}

/// Composite trapezoid rule for equally spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, .., last] => {
            let interior: f64 = values.iter().sum::<f64>() - 0.5 * (first + last);
            interior * step
        }
    }
}
