use num_complex::Complex64;

use crate::error::{FluctError, Result};
use crate::grid::GridSpec;
use crate::units::UnitSystem;

use super::clamp_variance;
use super::ensemble::MixedEnsemble;
use super::spectral::apply_kinetic;
use super::state::{hermite_functions, PureState};

/// `H = p²/2m + V(x)` with the potential sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    mass: f64,
    potential: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(mass: f64, potential: Vec<f64>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(FluctError::InvalidRecipe(format!(
                "mass must be > 0, got {mass}"
            )));
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(FluctError::InvalidRecipe("potential must be finite".into()));
        }
        Ok(HamiltonianSpec { mass, potential })
    }

    pub fn from_fn(grid: &GridSpec, mass: f64, v: impl Fn(f64) -> f64) -> Result<Self> {
        HamiltonianSpec::new(mass, grid.points().map(v).collect())
    }

    /// `V(x) = m ω² x² / 2`.
    pub fn harmonic(grid: &GridSpec, mass: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(FluctError::InvalidRecipe(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        HamiltonianSpec::from_fn(grid, mass, |x| 0.5 * mass * omega * omega * x * x)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if self.potential.len() != grid.n {
            return Err(FluctError::GridMismatch(format!(
                "potential has {} samples, grid has {}",
                self.potential.len(),
                grid.n
            )));
        }
        Ok(())
    }

    /// `Hψ`: kinetic term spectrally, potential pointwise.
    pub fn apply(&self, state: &PureState, units: &UnitSystem) -> Result<Vec<Complex64>> {
        self.check_grid(state.grid())?;
        let mut out = apply_kinetic(state.amplitudes(), state.grid(), self.mass, units);
        for ((o, a), v) in out.iter_mut().zip(state.amplitudes()).zip(&self.potential) {
            *o += a * v;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMoments {
    pub mean: f64,
    /// `⟨(H − ⟨E⟩)²⟩`.
    pub var: f64,
}

impl EnergyMoments {
    pub fn spread(&self) -> f64 {
        self.var.sqrt()
    }
}

/// `⟨H⟩` and `‖(H − ⟨H⟩)ψ‖²` for a pure state.
pub fn energy_moments(
    state: &PureState,
    h: &HamiltonianSpec,
    units: &UnitSystem,
) -> Result<EnergyMoments> {
    units.validate()?;
    let h_psi = h.apply(state, units)?;
    let grid = state.grid();
    let psi = state.amplitudes();
    let norm = state.norm_sqr();
    let overlap: Vec<f64> = psi
        .iter()
        .zip(&h_psi)
        .map(|(a, b)| (a.conj() * b).re)
        .collect();
    let mean = grid.trapezoid(&overlap) / norm;
    let residual: Vec<f64> = psi
        .iter()
        .zip(&h_psi)
        .map(|(a, b)| (b - a * mean).norm_sqr())
        .collect();
    let var = grid.trapezoid(&residual) / norm;
    if !mean.is_finite() {
        return Err(FluctError::NumericalFailure(format!(
            "mean energy is not finite ({mean})"
        )));
    }
    Ok(EnergyMoments {
        mean,
        var: clamp_variance(var, "energy variance")?,
    })
}

/// Trace moments of `H` over a mixture, with the variance taken about the
/// ensemble mean.
pub fn ensemble_energy_moments(
    ensemble: &MixedEnsemble,
    h: &HamiltonianSpec,
    units: &UnitSystem,
) -> Result<EnergyMoments> {
    let members = member_energy_moments(ensemble, h, units)?;
    Ok(combine_energy(ensemble.weights(), &members))
}

pub(crate) fn member_energy_moments(
    ensemble: &MixedEnsemble,
    h: &HamiltonianSpec,
    units: &UnitSystem,
) -> Result<Vec<EnergyMoments>> {
    ensemble
        .members()
        .iter()
        .map(|m| energy_moments(m, h, units))
        .collect()
}

pub(crate) fn combine_energy(weights: &[f64], members: &[EnergyMoments]) -> EnergyMoments {
    let mean: f64 = weights.iter().zip(members).map(|(w, m)| w * m.mean).sum();
    let var: f64 = weights
        .iter()
        .zip(members)
        .map(|(w, m)| w * (m.var + (m.mean - mean).powi(2)))
        .sum();
    EnergyMoments { mean, var }
}

/// Largest tolerated Boltzmann weight beyond the truncation level.
pub const THERMAL_TAIL_TOLERANCE: f64 = 1e-8;

/// Fraction of the full oscillator partition function carried by levels
/// above `n_max`: `exp(−ħω(n_max+1)/T)` (`k_B = 1`).
pub fn thermal_tail_mass(omega: f64, temperature: f64, n_max: usize, units: &UnitSystem) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    (-(units.hbar() * omega) * (n_max as f64 + 1.0) / temperature).exp()
}

/// Oscillator eigenstates `0..=n_max`, sampled and normalized on the grid.
pub fn oscillator_basis(
    n_max: usize,
    mass: f64,
    omega: f64,
    grid: &GridSpec,
    units: &UnitSystem,
) -> Result<Vec<PureState>> {
    grid.validate()?;
    units.validate()?;
    for (name, v) in [("mass", mass), ("omega", omega)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(FluctError::InvalidRecipe(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    let scale = (mass * omega / units.hbar()).sqrt();
    let rows: Vec<Vec<f64>> = grid
        .points()
        .map(|x| hermite_functions(n_max, scale * x))
        .collect();
    (0..=n_max)
        .map(|n| {
            let amps = rows
                .iter()
                .map(|r| Complex64::new(scale.sqrt() * r[n], 0.0))
                .collect();
            PureState::normalize(*grid, amps).map_err(|e| FluctError::AtParameter {
                label: "n",
                parameter: n as f64,
                source: Box::new(e),
            })
        })
        .collect()
}

fn check_thermal_inputs(omega: f64, mass: f64, temperature: f64) -> Result<()> {
    for (name, v) in [("mass", mass), ("omega", omega)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(FluctError::InvalidRecipe(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(FluctError::InvalidRecipe(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    Ok(())
}

/// Gibbs state of the harmonic oscillator truncated at `n_max`.
pub fn thermal_ensemble(
    omega: f64,
    mass: f64,
    temperature: f64,
    n_max: usize,
    grid: &GridSpec,
    units: &UnitSystem,
) -> Result<MixedEnsemble> {
    check_thermal_inputs(omega, mass, temperature)?;
    let levels = if temperature == 0.0 { 0 } else { n_max };
    let basis = oscillator_basis(levels, mass, omega, grid, units)?;
    thermal_ensemble_from_basis(&basis, omega, temperature, n_max, units)
}

/// Like [`thermal_ensemble`] but reuses precomputed eigenstates;
/// `basis[n]` must be level `n` and cover at least `0..=n_max`
/// (only `basis[0]` at `T = 0`).
pub fn thermal_ensemble_from_basis(
    basis: &[PureState],
    omega: f64,
    temperature: f64,
    n_max: usize,
    units: &UnitSystem,
) -> Result<MixedEnsemble> {
    check_thermal_inputs(omega, 1.0, temperature)?;
    if basis.is_empty() {
        return Err(FluctError::InvalidArgument("empty eigenbasis".into()));
    }
    if temperature == 0.0 {
        return Ok(MixedEnsemble::pure(basis[0].clone()));
    }
    if basis.len() <= n_max {
        return Err(FluctError::InvalidArgument(format!(
            "eigenbasis has {} levels, need {}",
            basis.len(),
            n_max + 1
        )));
    }
    let tail = thermal_tail_mass(omega, temperature, n_max, units);
    if tail.is_nan() || tail >= THERMAL_TAIL_TOLERANCE {
        return Err(FluctError::Truncation { tail, n_max });
    }
    let quantum = units.hbar() * omega / temperature;
    // Levels whose weight underflows to zero are dropped; weights must be positive.
    let raw: Vec<(f64, &PureState)> = basis[..=n_max]
        .iter()
        .enumerate()
        .map(|(n, s)| ((-quantum * n as f64).exp(), s))
        .filter(|(w, _)| *w > 0.0)
        .collect();
    let z: f64 = raw.iter().map(|(w, _)| w).sum();
    let (weights, members) = raw.into_iter().map(|(w, s)| (w / z, s.clone())).unzip();
    MixedEnsemble::new(weights, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_state, ensemble_moments, StateRecipe};

    fn grid() -> GridSpec {
        GridSpec::new(-12.0, 12.0, 1024).unwrap()
    }

    #[test]
    fn ground_state_energy() {
        let g = grid();
        let u = UnitSystem::default();
        let s = build_state(
            &StateRecipe::OscillatorEigenstate {
                n: 0,
                mass: 1.0,
                omega: 1.0,
            },
            &g,
            &u,
        )
        .unwrap();
        let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0).unwrap();
        let e = energy_moments(&s, &h, &u).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-10);
        assert!(e.var.abs() < 1e-6);
    }

    #[test]
    fn coherent_state_energy() {
        let g = grid();
        let u = UnitSystem::default();
        let s = build_state(
            &StateRecipe::CoherentState {
                alpha: Complex64::new(1.0, 0.0),
                mass: 1.0,
                omega: 1.0,
            },
            &g,
            &u,
        )
        .unwrap();
        let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0).unwrap();
        let e = energy_moments(&s, &h, &u).unwrap();
        assert!((e.mean - 1.5).abs() < 1e-4);
        assert!((e.var - 1.0).abs() < 1e-4);
    }

    #[test]
    fn potential_length_mismatch() {
        let g = grid();
        let u = UnitSystem::default();
        let s = build_state(
            &StateRecipe::OscillatorEigenstate {
                n: 0,
                mass: 1.0,
                omega: 1.0,
            },
            &g,
            &u,
        )
        .unwrap();
        let h = HamiltonianSpec::new(1.0, vec![0.0; 10]).unwrap();
        assert!(matches!(
            energy_moments(&s, &h, &u),
            Err(FluctError::GridMismatch(_))
        ));
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        let g = grid();
        let u = UnitSystem::default();
        let e = thermal_ensemble(1.0, 1.0, 0.0, 5, &g, &u).unwrap();
        assert_eq!(e.weights(), &[1.0]);
        let h = HamiltonianSpec::harmonic(&g, 1.0, 1.0).unwrap();
        let em = ensemble_energy_moments(&e, &h, &u).unwrap();
        assert!(em.var.abs() < 1e-6);
    }

    #[test]
    fn boltzmann_ratio() {
        let g = GridSpec::new(-16.0, 16.0, 1024).unwrap();
        let u = UnitSystem::default();
        let e = thermal_ensemble(1.0, 1.0, 1.0, 25, &g, &u).unwrap();
        let w = e.weights();
        assert!((w[1] / w[0] - (-1f64).exp()).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_product_matches_coth() {
        let g = GridSpec::new(-16.0, 16.0, 1024).unwrap();
        let u = UnitSystem::default();
        let e = thermal_ensemble(1.0, 1.0, 1.0, 25, &g, &u).unwrap();
        let m = ensemble_moments(&e, &u).unwrap();
        // 0.5·coth(0.5) from an independent high-precision evaluation
        assert!((m.product() - 1.081976706869326).abs() < 1e-6);
    }

    #[test]
    fn truncation_error() {
        let g = grid();
        let u = UnitSystem::default();
        let r = thermal_ensemble(1.0, 1.0, 1.0, 5, &g, &u);
        assert!(matches!(r, Err(FluctError::Truncation { n_max: 5, .. })));
        assert!(matches!(
            thermal_ensemble(0.0, 1.0, 1.0, 5, &g, &u),
            Err(FluctError::InvalidRecipe(_))
        ));
        assert!(matches!(
            thermal_ensemble(1.0, 1.0, -1.0, 5, &g, &u),
            Err(FluctError::InvalidRecipe(_))
        ));
    }
}
