use thiserror::Error;

/// Failures raised by state construction, moment evaluation and the
/// fluctuation-density routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluctError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid unit system: {0}")]
    InvalidUnits(String),

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error(
        "state does not vanish at the grid edges (edge/max amplitude ratio {ratio:.3e} >= 1e-6)"
    )]
    DecayGuardViolation { ratio: f64 },

    #[error("state is not normalized (trapezoid norm {norm:.17e})")]
    NotNormalized { norm: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),

    #[error("Boltzmann tail mass {tail:.3e} beyond n_max = {n_max} is not below 1e-8")]
    Truncation { tail: f64, n_max: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("input must be strictly positive, got {0}")]
    NonPositiveInput(f64),

    #[error("zero separation from the mean in {axis}; the extremal variances are undefined there (use the degenerate spread)")]
    ZeroSeparation { axis: &'static str },

    #[error("finite-difference step {0} outside (1e-8, 1e-1)")]
    InvalidStep(f64),

    #[error("mesh spacing {spacing:.3e} does not resolve the spread {spread:.3e} (need spacing <= spread/10)")]
    Resolution { spacing: f64, spread: f64 },

    #[error("inadmissible fluctuation parameters: {0}")]
    InadmissibleParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at {label} = {parameter}: {source}")]
    AtParameter {
        label: &'static str,
        parameter: f64,
        #[source]
        source: Box<FluctError>,
    },
}

impl FluctError {
    /// Strips any sweep context and returns the underlying failure.
    pub fn root(&self) -> &FluctError {
        match self {
            FluctError::AtParameter { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, FluctError>;
