//! Uncertainty-bound audit: the product `Δx·Δp` against `h/4π`, the
//! minimal/strict labelling, and the time–energy relation
//! `ΔE·Δt = h/4π`.
//!
//! The labels mirror a mapping (saturated bound ↔ "equilibrium", strict
//! inequality ↔ "non-equilibrium"); they are a classification of the
//! numbers, not a statement about any physical system.

use serde::{Deserialize, Serialize};

use crate::error::{FluctError, Result};
use crate::quantum::{
    combine_energy, member_energy_moments, HamiltonianSpec, MixedEnsemble, MomentReport,
};
use crate::units::UnitSystem;

pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Product within the relative tolerance of the bound ("equilibrium").
    Minimal,
    /// Product above the bound by more than the tolerance ("non-equilibrium").
    Strict,
    /// Product below the bound beyond the tolerance: a numerical artifact flag.
    BelowBound,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Minimal => "minimal",
            Verdict::Strict => "strict",
            Verdict::BelowBound => "below_bound",
        }
    }

    /// The equilibrium reading attached to the label.
    pub fn interpretation(&self) -> &'static str {
        match self {
            Verdict::Minimal => "equilibrium",
            Verdict::Strict => "non-equilibrium",
            Verdict::BelowBound => "numerical artifact",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub product: f64,
    pub bound: f64,
    /// `product/bound − 1`.
    pub relative_excess: f64,
}

pub fn uncertainty_product(m: &MomentReport) -> f64 {
    m.product()
}

/// Labels a moment report against the bound `h/4π`.
///
/// # Panics
///
/// If `epsilon` is not in `(0, 0.1)`.
pub fn classify(m: &MomentReport, units: &UnitSystem, epsilon: f64) -> Classification {
    assert!(
        epsilon > 0.0 && epsilon < 0.1,
        "epsilon {epsilon} outside (0, 0.1)"
    );
    let product = uncertainty_product(m);
    let bound = units.bound();
    let relative_excess = product / bound - 1.0;
    let verdict = if relative_excess > epsilon {
        Verdict::Strict
    } else if -relative_excess > epsilon {
        Verdict::BelowBound
    } else {
        Verdict::Minimal
    };
    Classification {
        verdict,
        product,
        bound,
        relative_excess,
    }
}

/// `Δt = h/(4π·ΔE)`. The map is its own inverse.
pub fn time_energy(delta_e: f64, units: &UnitSystem) -> Result<f64> {
    if !delta_e.is_finite() || delta_e <= 0.0 {
        return Err(FluctError::NonPositiveInput(delta_e));
    }
    Ok(units.bound() / delta_e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarityReport {
    pub member_delta_e: Vec<f64>,
    pub ensemble_delta_e: f64,
    /// `max_i |ΔE_i − ΔE| / max(ΔE, 1e−300)`. Reported, never asserted.
    pub max_relative_spread: f64,
}

/// Compares each member's energy spread with the ensemble's trace spread.
pub fn self_similarity_report(
    ensemble: &MixedEnsemble,
    h: &HamiltonianSpec,
    units: &UnitSystem,
) -> Result<SelfSimilarityReport> {
    let members = member_energy_moments(ensemble, h, units)?;
    let total = combine_energy(ensemble.weights(), &members);
    let member_delta_e: Vec<f64> = members.iter().map(|m| m.spread()).collect();
    let ensemble_delta_e = total.spread();
    let max_relative_spread = member_delta_e
        .iter()
        .map(|d| (d - ensemble_delta_e).abs() / ensemble_delta_e.max(1e-300))
        .fold(0.0, f64::max);
    Ok(SelfSimilarityReport {
        member_delta_e,
        ensemble_delta_e,
        max_relative_spread,
    })
}

/// Mixing entropy `−Σρ_i ln ρ_i` of the ensemble weights. Display-only;
/// not a thermodynamic entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySurrogate {
    pub value: f64,
}

pub fn entropy_surrogate(ensemble: &MixedEnsemble) -> EntropySurrogate {
    let value = ensemble
        .weights()
        .iter()
        .map(|&w| -w * w.ln())
        .sum::<f64>()
        .max(0.0);
    EntropySurrogate { value }
}

/// Machine-readable audit record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub product: f64,
    pub bound: f64,
    pub classification: Verdict,
    pub relative_excess: f64,
    pub delta_t: Option<f64>,
    pub entropy_surrogate: f64,
}

impl AuditReport {
    pub fn new(c: &Classification, delta_t: Option<f64>, entropy: EntropySurrogate) -> Self {
        AuditReport {
            product: c.product,
            bound: c.bound,
            classification: c.verdict,
            relative_excess: c.relative_excess,
            delta_t,
            entropy_surrogate: entropy.value,
        }
    }
}
