//! Canonical JSON documents for ensembles, scenarios and reports.
//!
//! Complex numbers are `[re, im]` pairs. Floats use the shortest decimal
//! form that parses back to the same bits, so documents round-trip exactly.
//! Arrays of numbers (and arrays of such arrays) are printed on one line;
//! everything else is indented, with fields in declaration order.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{BoundReport, BoundScenario, PairMeasurement};
use crate::error::{Error, Result};
use crate::ontology::FuzzReport;
use crate::quantum::{gram_deviation, pairs, MeasurementBasis, PureState, StateEnsemble, MAX_DIM};

pub const FORMAT_VERSION: &str = "1";
/// Largest Gram-matrix deviation accepted for a basis read from a document.
pub const DOCUMENT_UNITARY_TOL: f64 = 1e-8;
/// Largest `|‖ψ‖² − 1|` accepted for a state read from a document.
pub const DOCUMENT_NORM_TOL: f64 = 1e-8;

pub type ComplexEntry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDocument {
    pub format_version: String,
    pub dimension: usize,
    pub psi0: Vec<ComplexEntry>,
    pub satellites: Vec<Vec<ComplexEntry>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
}

impl AssignmentEntry {
    pub fn columns(&self) -> [usize; 3] {
        [self.m0, self.m1, self.m2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementEntry {
    pub pair: [usize; 2],
    /// Matrix rows; the columns are the basis vectors.
    pub basis: Vec<Vec<ComplexEntry>>,
    pub assignment: AssignmentEntry,
    /// `[from, into]`: column `from` answers with the outcome of column `into`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merged: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub format_version: String,
    pub ensemble: EnsembleDocument,
    pub measurements: Vec<MeasurementEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<BoundReport>,
}

/// A document that can check its own invariants after parsing.
pub trait Document: Serialize + DeserializeOwned {
    /// Every invariant violation, one message each.
    fn validation_errors(&self) -> Vec<String>;
}

fn encode(z: &Complex64) -> ComplexEntry {
    [z.re, z.im]
}

fn decode(z: &ComplexEntry) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn check_vector(v: &[ComplexEntry], dim: usize, what: &str, errors: &mut Vec<String>) {
    if v.len() != dim {
        errors.push(format!("{what} has {} amplitudes, expected {dim}", v.len()));
        return;
    }
    if v.iter().flatten().any(|x| !x.is_finite()) {
        errors.push(format!("{what} has a non-finite amplitude"));
        return;
    }
    let norm_sq: f64 = v.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum();
    if !((norm_sq - 1.0).abs() <= DOCUMENT_NORM_TOL) {
        errors.push(format!("{what} has squared norm {norm_sq}, expected 1 within {DOCUMENT_NORM_TOL:e}"));
    }
}

fn check_version(v: &str, errors: &mut Vec<String>) {
    if v != FORMAT_VERSION {
        errors.push(format!("unsupported format_version {v:?}, expected {FORMAT_VERSION:?}"));
    }
}

impl EnsembleDocument {
    pub fn from_ensemble(e: &StateEnsemble, metadata: BTreeMap<String, String>) -> Self {
        let vector = |s: &PureState| s.amplitudes().iter().map(encode).collect();
        Self {
            format_version: FORMAT_VERSION.to_string(),
            dimension: e.dim(),
            psi0: vector(e.psi0()),
            satellites: e.satellites().iter().map(vector).collect(),
            metadata,
        }
    }

    pub fn to_ensemble(&self) -> Result<StateEnsemble> {
        let errors = self.validation_errors();
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let state = |v: &Vec<ComplexEntry>| PureState::new(v.iter().map(decode).collect());
        let satellites = self.satellites.iter().map(state).collect::<Result<Vec<_>>>()?;
        StateEnsemble::new(state(&self.psi0)?, satellites)
    }
}

impl Document for EnsembleDocument {
    fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        check_version(&self.format_version, &mut errors);
        if self.dimension < 2 || self.dimension > MAX_DIM {
            errors.push(format!("dimension {} outside 2..={MAX_DIM}", self.dimension));
            return errors;
        }
        check_vector(&self.psi0, self.dimension, "psi0", &mut errors);
        if self.satellites.len() < 2 {
            errors.push(format!("need at least 2 satellites, found {}", self.satellites.len()));
        }
        for (j, s) in self.satellites.iter().enumerate() {
            check_vector(s, self.dimension, &format!("satellite {}", j + 1), &mut errors);
        }
        errors
    }
}

impl MeasurementEntry {
    pub fn from_measurement(m: &PairMeasurement) -> Self {
        let vectors = m.basis.vectors();
        let d = vectors.nrows();
        let labels = m.basis.labels();
        let first_with = |label| labels.iter().position(|&l| l == label).expect("assigned label present");
        let columns = m.assignment.map(first_with);
        let merged: Vec<[usize; 2]> =
            (0..d).filter(|c| !columns.contains(c)).map(|c| [c, first_with(labels[c])]).collect();
        Self {
            pair: [m.pair.0, m.pair.1],
            basis: (0..d).map(|r| (0..d).map(|c| encode(&vectors[(r, c)])).collect()).collect(),
            assignment: AssignmentEntry { m0: columns[0], m1: columns[1], m2: columns[2] },
            merged: (!merged.is_empty()).then_some(merged),
        }
    }

    /// Outcome label of every column, or the reasons there is none.
    fn column_labels(&self, d: usize) -> std::result::Result<Vec<usize>, Vec<String>> {
        let mut errors = Vec::new();
        let mut labels: Vec<Option<usize>> = vec![None; d];
        let columns = self.assignment.columns();
        for (i, &c) in columns.iter().enumerate() {
            if c >= d {
                errors.push(format!("m{i} assigned to column {c}, but the basis has {d} columns"));
            } else if labels[c].is_some() {
                errors.push(format!("column {c} assigned to more than one outcome"));
            } else {
                labels[c] = Some(i);
            }
        }
        for &[from, into] in self.merged.iter().flatten() {
            if from >= d || into >= d {
                errors.push(format!("merge [{from}, {into}] refers to a column outside 0..{d}"));
            } else if columns.contains(&from) || labels[from].is_some() {
                errors.push(format!("merge [{from}, {into}]: column {from} already has an outcome"));
            } else if let Some(i) = columns.iter().position(|&c| c == into) {
                labels[from] = Some(i);
            } else {
                errors.push(format!("merge [{from}, {into}]: column {into} is not assigned to m0, m1 or m2"));
            }
        }
        for (c, l) in labels.iter().enumerate() {
            if l.is_none() && c < d && errors.is_empty() {
                errors.push(format!("incomplete assignment: column {c} is neither assigned nor merged"));
            }
        }
        if errors.is_empty() {
            Ok(labels.into_iter().map(|l| l.expect("checked")).collect())
        } else {
            Err(errors)
        }
    }

    fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.basis.len();
        DMatrix::from_fn(d, d, |r, c| decode(&self.basis[r][c]))
    }

    fn validation_errors(&self, d: usize, n: usize) -> Vec<String> {
        let [j1, j2] = self.pair;
        let name = format!("measurement ({j1}, {j2})");
        let mut errors = Vec::new();
        if !(1 <= j1 && j1 < j2 && j2 <= n) {
            errors.push(format!("{name}: pair must satisfy 1 <= j1 < j2 <= {n}"));
        }
        if self.basis.len() != d || self.basis.iter().any(|r| r.len() != d) {
            errors.push(format!("{name}: basis must be {d}x{d}"));
            return errors;
        }
        if self.basis.iter().flatten().flatten().any(|x| !x.is_finite()) {
            errors.push(format!("{name}: basis has a non-finite entry"));
            return errors;
        }
        let deviation = gram_deviation(&self.matrix());
        if !(deviation <= DOCUMENT_UNITARY_TOL) {
            errors.push(format!(
                "{name}: basis Gram deviation {deviation:.3e} exceeds {DOCUMENT_UNITARY_TOL:e}"
            ));
        }
        if let Err(e) = self.column_labels(d) {
            errors.extend(e.into_iter().map(|m| format!("{name}: {m}")));
        }
        errors
    }

    pub fn to_measurement(&self) -> Result<PairMeasurement> {
        let d = self.basis.len();
        let labels = self.column_labels(d).map_err(Error::Validation)?;
        Ok(PairMeasurement {
            pair: (self.pair[0], self.pair[1]),
            basis: MeasurementBasis::with_tolerance(self.matrix(), labels, DOCUMENT_UNITARY_TOL)?,
            assignment: [0, 1, 2],
        })
    }
}

impl ScenarioDocument {
    pub fn from_scenario(
        s: &BoundScenario,
        metadata: BTreeMap<String, String>,
        report: Option<BoundReport>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            ensemble: EnsembleDocument::from_ensemble(s.ensemble(), metadata),
            measurements: s.measurements().iter().map(MeasurementEntry::from_measurement).collect(),
            report,
        }
    }

    pub fn to_scenario(&self) -> Result<BoundScenario> {
        let errors = self.validation_errors();
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let ensemble = self.ensemble.to_ensemble()?;
        let measurements =
            self.measurements.iter().map(MeasurementEntry::to_measurement).collect::<Result<Vec<_>>>()?;
        BoundScenario::new(ensemble, measurements)
    }
}

impl Document for ScenarioDocument {
    fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        check_version(&self.format_version, &mut errors);
        errors.extend(self.ensemble.validation_errors().into_iter().map(|m| format!("ensemble: {m}")));
        let (d, n) = (self.ensemble.dimension, self.ensemble.satellites.len());
        for m in &self.measurements {
            errors.extend(m.validation_errors(d, n));
        }
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for m in &self.measurements {
            *seen.entry((m.pair[0], m.pair[1])).or_default() += 1;
        }
        for p in pairs(n) {
            match seen.get(&p).copied().unwrap_or(0) {
                0 => errors.push(format!("missing measurement for pair ({}, {})", p.0, p.1)),
                1 => {}
                k => errors.push(format!("pair ({}, {}) has {k} measurements", p.0, p.1)),
            }
        }
        errors
    }
}

impl Document for BoundReport {
    fn validation_errors(&self) -> Vec<String> {
        Vec::new()
    }
}

impl Document for FuzzReport {
    fn validation_errors(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Canonical text of a document, ending in a newline.
pub fn write_document<D: Serialize>(doc: &D) -> Result<Vec<u8>> {
    let value = serde_json::to_value(doc).map_err(|e| Error::Parse {
        path: String::new(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out.into_bytes())
}

/// Parses and validates a document.
pub fn read_document<D: Document>(bytes: &[u8]) -> Result<D> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: D = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse { path, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })?;
    de.end().map_err(|e| Error::Parse {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let errors = doc.validation_errors();
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(Error::Validation(errors))
    }
}

fn nesting(v: &Value) -> Option<usize> {
    match v {
        Value::Array(items) => items.iter().try_fold(1, |acc, x| Some(acc.max(1 + nesting(x)?))),
        Value::Object(_) => None,
        _ => Some(0),
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    const STEP: &str = "  ";
    match v {
        Value::Array(items) if nesting(v).is_some_and(|n| n <= 2) || items.is_empty() => {
            out.push('[');
            for (k, x) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                out.push_str(&STEP.repeat(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&STEP.repeat(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&STEP.repeat(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&STEP.repeat(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
