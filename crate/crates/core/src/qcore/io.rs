//! JSON state files.
//!
//! ```json
//! {"kind": "density", "dims": [2, 2], "data": [[[0.5, 0.0], ...], ...]}
//! {"kind": "pure", "dims": [4], "data": [[0.7071, 0.0], ...]}
//! {"kind": "ensemble", "dims": [2, 2], "probabilities": [0.5, 0.5],
//!  "data": [[[1.0, 0.0], ...], [[0.0, 0.0], ...]]}
//! ```
//!
//! Complex entries are `[re, im]` pairs, matrices are row-major nested arrays.
//! Non-finite numbers are rejected on read and on write.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::{ComplexMatrix, C64};
use super::state::{BipartiteSplit, DensityMatrix, PureState};
use crate::entanglement::Ensemble;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum StateFile {
    Density(DensityMatrix),
    Pure(PureState),
    Ensemble(Ensemble),
}

impl StateFile {
    /// The state as a density matrix (ensembles are mixed).
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            StateFile::Density(rho) => Ok(rho.clone()),
            StateFile::Pure(psi) => Ok(DensityMatrix::from_pure(psi)),
            StateFile::Ensemble(e) => e.mixture(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateFile::Density(_) => "density",
            StateFile::Pure(_) => "pure",
            StateFile::Ensemble(_) => "ensemble",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawState {
    kind: String,
    dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    probabilities: Option<Vec<Value>>,
    data: Value,
}

fn parse_number(v: &Value, what: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse(format!("{what}: expected a finite number, got {v}"))),
    }
}

fn parse_complex(v: &Value) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(C64::new(
            parse_number(re, "real part")?,
            parse_number(im, "imaginary part")?,
        )),
        _ => Err(Error::Parse(format!("expected [re, im], got {v}"))),
    }
}

fn parse_vector(v: &Value) -> Result<Vec<C64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of [re, im] pairs".into()))?
        .iter()
        .map(parse_complex)
        .collect()
}

fn parse_matrix(v: &Value) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rows".into()))?;
    let parsed: Vec<Vec<C64>> = rows.iter().map(parse_vector).collect::<Result<_>>()?;
    let cols = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    ComplexMatrix::new(parsed.len(), cols, parsed.into_iter().flatten().collect())
}

fn parse_split(dims: &[usize]) -> Result<Option<BipartiteSplit>> {
    match dims {
        [_] => Ok(None),
        [a, b] => BipartiteSplit::new(*a, *b).map(Some),
        _ => Err(Error::Parse(format!("dims must have one or two entries, got {dims:?}"))),
    }
}

fn dims_total(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Parses a state from JSON text.
pub fn parse_state(text: &str) -> Result<StateFile> {
    let raw: RawState =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let split = parse_split(&raw.dims)?;
    let dim = dims_total(&raw.dims);
    match raw.kind.as_str() {
        "density" => {
            let m = parse_matrix(&raw.data)?;
            if m.rows() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "dims {:?} but matrix has {} rows",
                    raw.dims,
                    m.rows()
                )));
            }
            Ok(StateFile::Density(DensityMatrix::new(m, split)?))
        }
        "pure" => {
            let v = parse_vector(&raw.data)?;
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "dims {:?} but vector has {} entries",
                    raw.dims,
                    v.len()
                )));
            }
            Ok(StateFile::Pure(PureState::new(v, split)?))
        }
        "ensemble" => {
            let split = split.ok_or_else(|| {
                Error::Parse("ensemble requires a bipartite dims [d_a, d_b]".into())
            })?;
            let probs = raw
                .probabilities
                .ok_or_else(|| Error::Parse("ensemble requires probabilities".into()))?
                .iter()
                .map(|p| parse_number(p, "probability"))
                .collect::<Result<Vec<_>>>()?;
            let members = raw
                .data
                .as_array()
                .ok_or_else(|| Error::Parse("ensemble data must be an array of vectors".into()))?
                .iter()
                .map(|v| {
                    let amps = parse_vector(v)?;
                    if amps.len() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "member has {} entries, dims give {dim}",
                            amps.len()
                        )));
                    }
                    PureState::new(amps, Some(split))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StateFile::Ensemble(Ensemble::new(probs, members)?))
        }
        other => Err(Error::Parse(format!("unknown state kind {other:?}"))),
    }
}

pub fn read_state(path: impl AsRef<Path>) -> Result<StateFile> {
    parse_state(&fs::read_to_string(path)?)
}

fn complex_value(z: C64) -> Result<Value> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidState(format!("non-finite entry {z}")));
    }
    Ok(Value::from(vec![z.re, z.im]))
}

fn vector_value(v: &[C64]) -> Result<Value> {
    Ok(Value::Array(v.iter().map(|&z| complex_value(z)).collect::<Result<_>>()?))
}

fn matrix_value(m: &ComplexMatrix) -> Result<Value> {
    let rows = (0..m.rows())
        .map(|i| vector_value(&(0..m.cols()).map(|j| m.get(i, j)).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok(Value::Array(rows))
}

fn dims_of(split: Option<BipartiteSplit>, dim: usize) -> Vec<usize> {
    match split {
        Some(s) => vec![s.dim_a, s.dim_b],
        None => vec![dim],
    }
}

/// JSON value in the state-file format.
pub fn state_to_value(state: &StateFile) -> Result<Value> {
    let raw = match state {
        StateFile::Density(rho) => RawState {
            kind: "density".into(),
            dims: dims_of(rho.split(), rho.dim()),
            probabilities: None,
            data: matrix_value(rho.matrix())?,
        },
        StateFile::Pure(psi) => RawState {
            kind: "pure".into(),
            dims: dims_of(psi.split(), psi.dim()),
            probabilities: None,
            data: vector_value(psi.amplitudes())?,
        },
        StateFile::Ensemble(e) => RawState {
            kind: "ensemble".into(),
            dims: vec![e.split().dim_a, e.split().dim_b],
            probabilities: Some(e.probabilities().iter().map(|&p| Value::from(p)).collect()),
            data: Value::Array(
                e.members()
                    .iter()
                    .map(|m| vector_value(m.amplitudes()))
                    .collect::<Result<_>>()?,
            ),
        },
    };
    serde_json::to_value(raw).map_err(|e| Error::Parse(e.to_string()))
}

pub fn state_to_string(state: &StateFile) -> Result<String> {
    let v = state_to_value(state)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Formats a double with 17 significant digits, independent of locale.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_state(path: impl AsRef<Path>, state: &StateFile) -> Result<()> {
    fs::write(path, state_to_string(state)?)?;
    Ok(())
}
