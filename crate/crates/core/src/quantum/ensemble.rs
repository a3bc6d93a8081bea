use crate::error::{FluctError, Result};
use crate::grid::GridSpec;

use super::state::PureState;

/// Allowed deviation of `Σρ_i` from one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;

/// Incoherent mixture `ρ = Σ ρ_i |ψ_i⟩⟨ψ_i|` with classical weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnsemble {
    weights: Vec<f64>,
    members: Vec<PureState>,
}

impl MixedEnsemble {
    pub fn new(weights: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FluctError::InvalidWeights("ensemble has no members".into()));
        }
        if weights.len() != members.len() {
            return Err(FluctError::InvalidWeights(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !(w.is_finite() && **w > 0.0 && **w <= 1.0))
        {
            return Err(FluctError::InvalidWeights(format!(
                "weight {w} outside (0, 1]"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(FluctError::InvalidWeights(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let grid = *members[0].grid();
        if let Some((i, m)) = members.iter().enumerate().find(|(_, m)| *m.grid() != grid) {
            return Err(FluctError::GridMismatch(format!(
                "member {i} lives on {:?}, member 0 on {grid:?}",
                m.grid()
            )));
        }
        Ok(MixedEnsemble { weights, members })
    }

    pub fn pure(state: PureState) -> Self {
        MixedEnsemble {
            weights: vec![1.0],
            members: vec![state],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn grid(&self) -> &GridSpec {
        self.members[0].grid()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(&self.members)
    }
}
