use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};
use crate::grid::GridSpec;
use crate::units::UnitSystem;

/// Largest admissible ratio of an edge amplitude to the peak amplitude.
pub const DECAY_GUARD: f64 = 1e-6;

/// Allowed deviation of the trapezoid L2 norm from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized complex amplitudes on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized, e.g. read from a file.
    /// The normalization and the decay guard are re-verified.
    pub fn from_normalized(grid: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        check_length(&grid, amplitudes.len())?;
        let norm = l2_norm_sqr(&grid, &amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(FluctError::NotNormalized { norm });
        }
        check_decay(&amplitudes)?;
        Ok(PureState { grid, amplitudes })
    }

    /// Normalizes arbitrary (nonzero) samples and applies the decay guard.
    pub fn normalize(grid: GridSpec, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        check_length(&grid, amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(FluctError::InvalidRecipe(
                "amplitudes must be finite".into(),
            ));
        }
        let norm = l2_norm_sqr(&grid, &amplitudes);
        if norm.is_nan() || norm <= 0.0 {
            return Err(FluctError::InvalidRecipe(
                "amplitudes have zero norm".into(),
            ));
        }
        check_decay(&amplitudes)?;
        let scale = norm.sqrt().recip();
        for a in &mut amplitudes {
            *a *= scale;
        }
        Ok(PureState { grid, amplitudes })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|ψ(x_j)|²` at every grid point.
    pub fn probability_density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        l2_norm_sqr(&self.grid, &self.amplitudes)
    }

    /// Multiplies the amplitudes by `exp(i k x)`, shifting the momentum by `ħk`.
    pub fn boosted(&self, k: f64) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(self.grid.points())
            .map(|(a, x)| a * Complex64::from_polar(1.0, k * x))
            .collect();
        PureState {
            grid: self.grid,
            amplitudes,
        }
    }
}

fn check_length(grid: &GridSpec, len: usize) -> Result<()> {
    if len != grid.n {
        return Err(FluctError::GridMismatch(format!(
            "{len} amplitudes for a grid of {} points",
            grid.n
        )));
    }
    Ok(())
}

fn l2_norm_sqr(grid: &GridSpec, amplitudes: &[Complex64]) -> f64 {
    let density: Vec<f64> = amplitudes.iter().map(|c| c.norm_sqr()).collect();
    grid.trapezoid(&density)
}

fn check_decay(amplitudes: &[Complex64]) -> Result<()> {
    let peak = amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (first, last) = match amplitudes {
        [first, .., last] => (first.norm(), last.norm()),
        _ => return Err(FluctError::InvalidGrid("too few samples".into())),
    };
    let ratio = first.max(last) / peak;
    if ratio.is_nan() || ratio >= DECAY_GUARD {
        return Err(FluctError::DecayGuardViolation { ratio });
    }
    Ok(())
}

/// Concrete test states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateRecipe {
    /// `|ψ|²` is a normal density with standard deviation `width` about
    /// `center`, carrying mean momentum `momentum`.
    GaussianPacket {
        center: f64,
        momentum: f64,
        width: f64,
    },
    /// Harmonic-oscillator eigenstate `n` for `V = m ω² x² / 2`.
    OscillatorEigenstate {
        n: usize,
        mass: f64,
        omega: f64,
    },
    /// Coherent state `|α⟩` of the same oscillator.
    CoherentState {
        alpha: Complex64,
        mass: f64,
        omega: f64,
    },
    RawSamples(Vec<Complex64>),
}

impl StateRecipe {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FluctError::InvalidRecipe(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(FluctError::InvalidRecipe(format!(
                    "{name} must be finite, got {v}"
                )))
            }
        };
        match self {
            StateRecipe::GaussianPacket {
                center,
                momentum,
                width,
            } => {
                finite("center", *center)?;
                finite("momentum", *momentum)?;
                positive("width", *width)
            }
            StateRecipe::OscillatorEigenstate { mass, omega, .. } => {
                positive("mass", *mass)?;
                positive("omega", *omega)
            }
            StateRecipe::CoherentState { alpha, mass, omega } => {
                finite("alpha.re", alpha.re)?;
                finite("alpha.im", alpha.im)?;
                positive("mass", *mass)?;
                positive("omega", *omega)
            }
            StateRecipe::RawSamples(_) => Ok(()),
        }
    }

    /// Closed-form amplitude at `x` (continuum normalization). `None` for
    /// raw samples.
    pub fn amplitude_at(&self, x: f64, units: &UnitSystem) -> Option<Complex64> {
        let hbar = units.hbar();
        match *self {
            StateRecipe::GaussianPacket {
                center,
                momentum,
                width,
            } => {
                let norm = (2.0 * PI * width * width).powf(-0.25);
                let d = x - center;
                Some(Complex64::from_polar(
                    norm * (-d * d / (4.0 * width * width)).exp(),
                    momentum * x / hbar,
                ))
            }
            StateRecipe::OscillatorEigenstate { n, mass, omega } => {
                let scale = (mass * omega / hbar).sqrt();
                let h = hermite_functions(n, scale * x);
                Some(Complex64::new(scale.sqrt() * h[n], 0.0))
            }
            StateRecipe::CoherentState { alpha, mass, omega } => {
                let x0 = (2.0 * hbar / (mass * omega)).sqrt() * alpha.re;
                let p0 = (2.0 * hbar * mass * omega).sqrt() * alpha.im;
                let norm = (mass * omega / (PI * hbar)).powf(0.25);
                let d = x - x0;
                Some(Complex64::from_polar(
                    norm * (-mass * omega * d * d / (2.0 * hbar)).exp(),
                    p0 * (x - 0.5 * x0) / hbar,
                ))
            }
            StateRecipe::RawSamples(_) => None,
        }
    }
}

/// Normalized Hermite functions `h_0(ξ) … h_n(ξ)` with
/// `∫ h_k² dξ = 1`, via the three-term recurrence (no factorials, no
/// overflow for moderate `n`).
pub fn hermite_functions(n: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * xi * out[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Samples a recipe on the grid and normalizes it under the trapezoid rule.
pub fn build_state(recipe: &StateRecipe, grid: &GridSpec, units: &UnitSystem) -> Result<PureState> {
    grid.validate()?;
    units.validate()?;
    recipe.validate()?;
    let amplitudes = match recipe {
        StateRecipe::RawSamples(samples) => samples.clone(),
        analytic => grid
            .points()
            .map(|x| analytic.amplitude_at(x, units).expect("analytic recipe"))
            .collect(),
    };
    PureState::normalize(*grid, amplitudes)
}
