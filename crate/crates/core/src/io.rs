//! JSON and CSV formats for states and spectra.
//!
//! Density matrix: `{ "n": 2, "matrix": [[[re, im], ...], ...] }`, row-major.
//! State vector: `{ "n": 2, "vector": [[re, im], ...] }`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::correlations::CorrelationSpectrum;
use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix, StateVector};

/// A state file's payload.
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    Matrix(DensityMatrix),
    Vector(StateVector),
}

impl StateInput {
    pub fn n_qubits(&self) -> usize {
        match self {
            StateInput::Matrix(m) => m.n_qubits(),
            StateInput::Vector(v) => v.n_qubits(),
        }
    }

    pub fn into_density_matrix(self) -> DensityMatrix {
        match self {
            StateInput::Matrix(m) => m,
            StateInput::Vector(v) => v.to_density_matrix(),
        }
    }
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn complex_at(value: &Value, location: &str) -> Result<Complex64> {
    let pair = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| parse_err(location, "expected a [re, im] pair"))?;
    let part = |i: usize| {
        pair[i]
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_err(format!("{location}[{i}]"), "expected a finite number"))
    };
    Ok(Complex64::new(part(0)?, part(1)?))
}

fn array_of_len<'a>(value: &'a Value, len: usize, location: &str) -> Result<&'a Vec<Value>> {
    let arr = value
        .as_array()
        .ok_or_else(|| parse_err(location, "expected an array"))?;
    if arr.len() != len {
        return Err(parse_err(location, format!("expected {len} entries, found {}", arr.len())));
    }
    Ok(arr)
}

/// Parses and validates a state file, refusing more than `dense_limit` qubits.
pub fn parse_state_json(text: &str, dense_limit: usize) -> Result<StateInput> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| parse_err("document", "expected a JSON object"))?;
    let n = obj
        .get("n")
        .ok_or_else(|| parse_err("n", "missing field"))?
        .as_u64()
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err("n", "expected a positive integer"))? as usize;
    if n > dense_limit {
        return Err(Error::Size { qubits: n, limit: dense_limit });
    }
    let dim = 1usize << n;
    match (obj.get("matrix"), obj.get("vector")) {
        (Some(_), Some(_)) => Err(parse_err("document", "give either \"matrix\" or \"vector\", not both")),
        (None, None) => Err(parse_err("document", "missing field \"matrix\" or \"vector\"")),
        (Some(rows), None) => {
            let rows = array_of_len(rows, dim, "matrix")?;
            let mut m = CMatrix::zeros(dim, dim);
            for (i, row) in rows.iter().enumerate() {
                let loc = format!("matrix[{i}]");
                for (j, entry) in array_of_len(row, dim, &loc)?.iter().enumerate() {
                    m[(i, j)] = complex_at(entry, &format!("matrix[{i}][{j}]"))?;
                }
            }
            DensityMatrix::new(m)
                .map(StateInput::Matrix)
                .map_err(|e| parse_err("matrix", e.to_string()))
        }
        (None, Some(entries)) => {
            let entries = array_of_len(entries, dim, "vector")?;
            let v = entries
                .iter()
                .enumerate()
                .map(|(i, e)| complex_at(e, &format!("vector[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            StateVector::new(DVector::from_vec(v))
                .map(StateInput::Vector)
                .map_err(|e| parse_err("vector", e.to_string()))
        }
    }
}

pub fn density_matrix_to_json(rho: &DensityMatrix) -> Value {
    let m = rho.matrix();
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect();
    json!({ "n": rho.n_qubits(), "matrix": rows })
}

pub fn state_vector_to_json(psi: &StateVector) -> Value {
    let entries: Vec<Value> = psi.amplitudes().iter().map(|a| json!([a.re, a.im])).collect();
    json!({ "n": psi.n_qubits(), "vector": entries })
}

pub fn spectrum_to_json(spectrum: &CorrelationSpectrum) -> Value {
    serde_json::to_value(spectrum).expect("spectrum serializes")
}

pub fn spectrum_from_json(text: &str) -> Result<CorrelationSpectrum> {
    serde_json::from_str(text).map_err(|e| {
        parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })
}

/// One row per order: `k,C_k,uncertainty` with a header line.
pub fn spectrum_to_csv(spectrum: &CorrelationSpectrum) -> String {
    let uncertainty = spectrum.uncertainty.map(|u| u.to_string()).unwrap_or_default();
    let mut out = String::from("k,C_k,uncertainty\n");
    for (k, c) in &spectrum.c_of_k {
        out.push_str(&format!("{k},{c},{uncertainty}\n"));
    }
    out
}
