//! JSON file schemas.
//!
//! * matrix: `{"rows": R, "cols": C, "entries": [[re, im], ...]}` (row-major)
//! * state: `{"d": int, "n": int, "matrix": <matrix>}`
//! * measurement set: `{"d": int, "n": int, "elements": [{"label": str, "ket": [[re, im], ...]}, ...]}`;
//!   an element may carry `"projector": <matrix>` instead of a ket, or
//!   `"operator": <matrix>` for an observable set (all elements alike)
//! * counts: `{"labels": [...], "counts": [...], "scale": number | "unknown", "seed": int | null, "exact": bool}`
//! * reconstruction: `{"schema": 1, "d", "n", "rho", "rho_linear", "scale", "method", "diagnostics"}`

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::measurement::{builtin_basis, CountRecord, MeasurementSet};
use crate::reconstruction::{Diagnostics, Method, ReconstructionResult};
use crate::states::DensityMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub n: usize,
    pub matrix: ComplexMatrix,
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        StateFile {
            d: rho.d(),
            n: rho.n_parts(),
            matrix: rho.matrix().clone(),
        }
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.d, self.n, self.matrix)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionFile {
    pub schema: u32,
    pub d: usize,
    pub n: usize,
    pub rho: ComplexMatrix,
    pub rho_linear: ComplexMatrix,
    pub scale: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl From<&ReconstructionResult> for ReconstructionFile {
    fn from(r: &ReconstructionResult) -> Self {
        let rho = r.reported();
        ReconstructionFile {
            schema: SCHEMA_VERSION,
            d: rho.d(),
            n: rho.n_parts(),
            rho: rho.matrix().clone(),
            rho_linear: r.rho_linear.matrix().clone(),
            scale: r.scale_estimate,
            method: r.method,
            diagnostics: r.diagnostics.clone(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads a state file, or the reported state of a reconstruction file.
pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let value: Value = read_json(path)?;
    if value.get("rho").is_some() {
        let rec: ReconstructionFile = serde_json::from_value(value)
            .map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))?;
        DensityMatrix::new(rec.d, rec.n, rec.rho)
    } else {
        let file: StateFile = serde_json::from_value(value)
            .map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))?;
        file.into_state()
    }
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    write_json(path, &StateFile::from(rho))
}

pub fn read_counts(path: &Path) -> Result<CountRecord> {
    let rec: CountRecord = read_json(path)?;
    rec.validate(true)?;
    Ok(rec)
}

/// A builtin id, or the path of a measurement-set file when one exists there.
pub fn resolve_basis(arg: &str) -> Result<MeasurementSet> {
    let path = Path::new(arg);
    if path.is_file() {
        read_measurement_set(path)
    } else {
        builtin_basis(arg)
    }
}

fn field<'a>(obj: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::invalid(join(path, key), "missing"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::invalid(path, "expected a non-negative integer"))
}

fn parse_ket(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::invalid(path, "expected an array of [re, im] pairs"))?;
    arr.iter()
        .enumerate()
        .map(|(i, z)| {
            let pair = z.as_array().filter(|p| p.len() == 2);
            let nums = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
            nums.map(|(re, im)| Complex64::new(re, im))
                .ok_or_else(|| Error::invalid(format!("{path}[{i}]"), "expected [re, im]"))
        })
        .collect()
}

fn parse_matrix(v: &Value, path: &str) -> Result<ComplexMatrix> {
    serde_json::from_value(v.clone()).map_err(|e| Error::invalid(path, e.to_string()))
}

/// Parses a measurement-set document, reporting the path of the first
/// offending field.
pub fn parse_measurement_set(doc: &Value) -> Result<MeasurementSet> {
    let d = as_usize(field(doc, "", "d")?, "d")?;
    let n = match doc.get("n") {
        Some(v) => as_usize(v, "n")?,
        None => 1,
    };
    let elements = field(doc, "", "elements")?
        .as_array()
        .ok_or_else(|| Error::invalid("elements", "expected an array"))?;
    if elements.is_empty() {
        return Err(Error::invalid("elements", "empty"));
    }
    let mut kets = Vec::new();
    let mut projectors = Vec::new();
    let mut observables = Vec::new();
    for (i, el) in elements.iter().enumerate() {
        let path = format!("elements[{i}]");
        let label = match el.get("label") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::invalid(join(&path, "label"), "expected a string")),
            None => format!("{i}"),
        };
        match (el.get("ket"), el.get("projector"), el.get("operator")) {
            (Some(k), None, None) => kets.push((label, parse_ket(k, &join(&path, "ket"))?)),
            (None, Some(m), None) => {
                projectors.push((label, parse_matrix(m, &join(&path, "projector"))?))
            }
            (None, None, Some(m)) => {
                observables.push((label, parse_matrix(m, &join(&path, "operator"))?))
            }
            _ => {
                return Err(Error::invalid(
                    path,
                    "needs exactly one of `ket`, `projector` or `operator`",
                ))
            }
        }
    }
    let total = elements.len();
    if kets.len() == total {
        MeasurementSet::from_kets(d, n, kets)
    } else if projectors.len() == total {
        MeasurementSet::from_projectors(d, n, projectors)
    } else if observables.len() == total {
        MeasurementSet::from_observables(d, n, observables)
    } else if observables.is_empty() {
        // Mixed kets and projectors: promote kets to projectors.
        let mut all: Vec<(usize, String, ComplexMatrix)> = Vec::with_capacity(total);
        let mut k_iter = kets.into_iter();
        let mut p_iter = projectors.into_iter();
        for (i, el) in elements.iter().enumerate() {
            if el.get("ket").is_some() {
                let (label, ket) = k_iter.next().expect("counted");
                let norm = crate::matrix::vector_norm(&ket);
                if !(norm > 0.0) {
                    return Err(Error::invalid(format!("elements[{i}].ket"), "zero ket"));
                }
                let unit: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
                all.push((i, label, ComplexMatrix::outer(&unit)));
            } else {
                let (label, m) = p_iter.next().expect("counted");
                all.push((i, label, m));
            }
        }
        MeasurementSet::from_projectors(d, n, all.into_iter().map(|(_, l, m)| (l, m)).collect())
    } else {
        Err(Error::invalid(
            "elements",
            "observable operators cannot be mixed with kets or projectors",
        ))
    }
}

pub fn read_measurement_set(path: &Path) -> Result<MeasurementSet> {
    let doc: Value = read_json(path)?;
    parse_measurement_set(&doc)
}

/// Serializes a ket-based set back to the file schema.
pub fn measurement_set_to_json(ms: &MeasurementSet) -> Value {
    let elements: Vec<Value> = match ms.kets() {
        Some(kets) => ms
            .labels()
            .iter()
            .zip(kets)
            .map(|(l, k)| {
                serde_json::json!({
                    "label": l,
                    "ket": k.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                })
            })
            .collect(),
        None => {
            let key = match ms.kind() {
                crate::measurement::MeasurementKind::Projective => "projector",
                crate::measurement::MeasurementKind::Observable => "operator",
            };
            ms.labels()
                .iter()
                .zip(ms.operators())
                .map(|(l, m)| serde_json::json!({ "label": l, key: m }))
                .collect()
        }
    };
    serde_json::json!({ "d": ms.d(), "n": ms.n_parts(), "elements": elements })
}
