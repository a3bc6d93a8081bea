//! JSON state/ensemble files, CSV tables and atomic output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::PhasePoint;
use crate::error::FluctError;
use crate::grid::GridSpec;
use crate::quantum::{MixedEnsemble, PureState};
use crate::scenarios::{SweepRow, WalkTrace};
use crate::units::UnitSystem;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed input at `{field}`: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: FluctError,
    },
    #[error("{0}")]
    Encode(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub units: UnitSystem,
    pub grid: GridSpec,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitudes {
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub units: UnitSystem,
    pub grid: GridSpec,
    pub weights: Vec<f64>,
    pub members: Vec<Amplitudes>,
}

fn split(amps: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    amps.iter().map(|c| (c.re, c.im)).unzip()
}

impl StateFile {
    pub fn from_state(state: &PureState, units: UnitSystem) -> Self {
        let (psi_re, psi_im) = split(state.amplitudes());
        StateFile {
            units,
            grid: *state.grid(),
            psi_re,
            psi_im,
        }
    }
}

impl EnsembleFile {
    pub fn from_ensemble(ensemble: &MixedEnsemble, units: UnitSystem) -> Self {
        let members = ensemble
            .members()
            .iter()
            .map(|m| {
                let (psi_re, psi_im) = split(m.amplitudes());
                Amplitudes { psi_re, psi_im }
            })
            .collect();
        EnsembleFile {
            units,
            grid: *ensemble.grid(),
            weights: ensemble.weights().to_vec(),
            members,
        }
    }
}

/// Contents of a state or ensemble file after validation.
#[derive(Debug, Clone)]
pub enum Loaded {
    State {
        units: UnitSystem,
        state: PureState,
    },
    Ensemble {
        units: UnitSystem,
        ensemble: MixedEnsemble,
    },
}

impl Loaded {
    pub fn units(&self) -> UnitSystem {
        match self {
            Loaded::State { units, .. } | Loaded::Ensemble { units, .. } => *units,
        }
    }

    pub fn into_ensemble(self) -> MixedEnsemble {
        match self {
            Loaded::State { state, .. } => MixedEnsemble::pure(state),
            Loaded::Ensemble { ensemble, .. } => ensemble,
        }
    }
}

fn parse_error(path: &Path, field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        field: field.into(),
        message: message.into(),
    }
}

fn join(path: &Path, field: &str, re: Vec<f64>, im: Vec<f64>) -> Result<Vec<Complex64>, IoError> {
    if re.len() != im.len() {
        return Err(parse_error(
            path,
            field,
            format!("psi_re has {} entries, psi_im has {}", re.len(), im.len()),
        ));
    }
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

fn typed<T: serde::de::DeserializeOwned>(
    path: &Path,
    value: serde_json::Value,
) -> Result<T, IoError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        parse_error(path, field, e.into_inner().to_string())
    })
}

/// Parses a state or ensemble document (ensembles carry `weights`),
/// re-verifying normalization, the decay guard and ensemble invariants.
pub fn parse_target(path: &Path, text: &str) -> Result<Loaded, IoError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        parse_error(
            path,
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let invalid = |source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    };
    if !value.is_object() {
        return Err(parse_error(path, ".", "expected a JSON object"));
    }
    if value.get("weights").is_some() {
        let file: EnsembleFile = typed(path, value)?;
        file.units.validate().map_err(invalid)?;
        let mut members = Vec::with_capacity(file.members.len());
        for (i, m) in file.members.into_iter().enumerate() {
            let amps = join(path, &format!("members[{i}]"), m.psi_re, m.psi_im)?;
            members.push(PureState::from_normalized(file.grid, amps).map_err(|e| {
                invalid(FluctError::AtParameter {
                    label: "member",
                    parameter: i as f64,
                    source: Box::new(e),
                })
            })?);
        }
        let ensemble = MixedEnsemble::new(file.weights, members).map_err(invalid)?;
        Ok(Loaded::Ensemble {
            units: file.units,
            ensemble,
        })
    } else {
        let file: StateFile = typed(path, value)?;
        file.units.validate().map_err(invalid)?;
        let amps = join(path, "psi_re/psi_im", file.psi_re, file.psi_im)?;
        let state = PureState::from_normalized(file.grid, amps).map_err(invalid)?;
        Ok(Loaded::State {
            units: file.units,
            state,
        })
    }
}

pub fn load_target(path: &Path) -> Result<Loaded, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_target(path, &text)
}

/// Writes via a temporary file in the destination directory and renames it
/// into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let io = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, IoError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| IoError::Encode(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// 17 significant digits, `.` as decimal separator regardless of locale.
pub fn fmt_machine(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_bytes<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<Vec<u8>, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| IoError::Encode(e.to_string());
    w.write_record(header).map_err(enc)?;
    for row in rows {
        w.write_record(&row).map_err(enc)?;
    }
    w.into_inner().map_err(|e| IoError::Encode(e.to_string()))
}

pub fn samples_csv(points: &[PhasePoint]) -> Result<Vec<u8>, IoError> {
    csv_bytes(
        ["x", "p"],
        points
            .iter()
            .map(|pt| [fmt_machine(pt.x), fmt_machine(pt.p)]),
    )
}

pub fn scan_csv(rows: &[(PhasePoint, f64)]) -> Result<Vec<u8>, IoError> {
    csv_bytes(
        ["x", "p", "f"],
        rows.iter()
            .map(|(pt, f)| [fmt_machine(pt.x), fmt_machine(pt.p), fmt_machine(*f)]),
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>, IoError> {
    csv_bytes(
        [
            "label",
            "parameter",
            "product",
            "bound",
            "classification",
            "entropy_surrogate",
        ],
        rows.iter().map(|r| {
            [
                r.label.clone(),
                fmt_machine(r.parameter),
                fmt_machine(r.product),
                fmt_machine(r.bound),
                r.classification.label().to_string(),
                fmt_machine(r.entropy_surrogate),
            ]
        }),
    )
}

pub fn walk_csv(trace: &[WalkTrace]) -> Result<Vec<u8>, IoError> {
    csv_bytes(
        ["step", "product", "distance_to_bound"],
        trace.iter().map(|w| {
            [
                w.step.to_string(),
                fmt_machine(w.product),
                fmt_machine(w.distance_to_bound),
            ]
        }),
    )
}
