//! Numerical laboratory for phase-space fluctuation statistics.
//!
//! * [`quantum`]: pure states, mixed ensembles and their position,
//!   momentum and energy moments on a 1-D grid.
//! * [`audit`]: the uncertainty product against `h/4π`, the
//!   minimal/strict classification, and `ΔE·Δt = h/4π`.
//! * [`density`]: Gaussian fluctuation densities, extremal variances
//!   and their finite-difference verification, sampling and quadrature.
//! * [`scenarios`]: eigenstate and thermal sweeps, toy relaxation walk.
//! * [`io`] and [`cli`]: file formats and the `fluctlab` command.

pub mod audit;
pub mod cli;
pub mod density;
pub mod error;
pub mod grid;
pub mod io;
pub mod quantum;
pub mod scenarios;
pub mod units;

pub use error::{FluctError, Result};
pub use grid::GridSpec;
pub use units::UnitSystem;
