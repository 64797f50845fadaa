//! JSON document schemas for the on-disk interchange formats.
//!
//! * lattice: `{"elements": [..], "covers": [[lo, hi], ..], "ortho": {..}}`
//! * density matrix: `{"dim": n, "re": [[..]], "im": [[..]]}`
//! * frame: `{"dim": n, "vectors": [{"re": [..], "im": [..]}, ..]}`
//! * measure: `{"lattice": <id or inline>, "values": {label: p}}`, or
//!   `"atom_values"` keyed by atom label for completion by additivity.
//!
//! Violation records `{rule, witnesses, residual}` give machine-readable
//! reasons when validation fails.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hilbert::{DensityMatrix, HilbertError, HilbertFrame};
use crate::lattice::{FiniteOrthoLattice, LatticeError};
use crate::measures::{ClassicalMeasure, GeneralizedMeasure, MeasureError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("no value given for element `{0}`")]
    MissingValue(String),
    #[error("measure document needs `values` or `atom_values`")]
    EmptyMeasure,
    #[error("malformed document: {0}")]
    Shape(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

// ----------------------------------------------------------------------
// Lattice documents
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
    pub ortho: BTreeMap<String, String>,
}

impl LatticeDoc {
    pub fn to_lattice(&self) -> Result<FiniteOrthoLattice, IoError> {
        Ok(FiniteOrthoLattice::from_covers(self.elements.clone(), &self.covers, &self.ortho)?)
    }

    pub fn from_lattice(lattice: &FiniteOrthoLattice) -> Self {
        let elements = lattice.labels().to_vec();
        let covers = lattice
            .cover_pairs()
            .into_iter()
            .map(|(a, b)| (lattice.label(a).to_string(), lattice.label(b).to_string()))
            .collect();
        let ortho = lattice
            .element_indices()
            .map(|a| (lattice.label(a).to_string(), lattice.label(lattice.ortho(a)).to_string()))
            .collect();
        LatticeDoc { elements, covers, ortho }
    }
}

// ----------------------------------------------------------------------
// Hilbert documents
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityDoc {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityDoc {
    pub fn to_density(&self) -> Result<DensityMatrix, IoError> {
        let mat = complex_matrix(self.dim, &self.re, &self.im)?;
        Ok(DensityMatrix::new(mat)?)
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let m = rho.matrix();
        DensityDoc {
            dim,
            re: (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorDoc {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameDoc {
    pub dim: usize,
    pub vectors: Vec<VectorDoc>,
}

impl FrameDoc {
    pub fn to_frame(&self) -> Result<HilbertFrame, IoError> {
        if self.vectors.len() != self.dim {
            return Err(IoError::Shape(format!(
                "{} vectors for dimension {}",
                self.vectors.len(),
                self.dim
            )));
        }
        let mut columns = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for (j, v) in self.vectors.iter().enumerate() {
            if v.re.len() != self.dim || v.im.len() != self.dim {
                return Err(IoError::Shape(format!("vector {j} has the wrong length")));
            }
            let col = DVector::from_iterator(
                self.dim,
                v.re.iter().zip(&v.im).map(|(&re, &im)| Complex64::new(re, im)),
            );
            columns.column_mut(j).copy_from(&col);
        }
        Ok(HilbertFrame::from_columns(columns)?)
    }

    pub fn from_frame(frame: &HilbertFrame) -> Self {
        let dim = frame.dim();
        let m = frame.as_matrix();
        let vectors = (0..dim)
            .map(|j| VectorDoc {
                re: (0..dim).map(|i| m[(i, j)].re).collect(),
                im: (0..dim).map(|i| m[(i, j)].im).collect(),
            })
            .collect();
        FrameDoc { dim, vectors }
    }
}

fn complex_matrix(
    dim: usize,
    re: &[Vec<f64>],
    im: &[Vec<f64>],
) -> Result<DMatrix<Complex64>, IoError> {
    if re.len() != dim || im.len() != dim {
        return Err(IoError::Shape(format!("expected {dim} rows")));
    }
    for (i, (r, c)) in re.iter().zip(im).enumerate() {
        if r.len() != dim || c.len() != dim {
            return Err(IoError::Shape(format!("row {i} has the wrong length")));
        }
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im[i][j])))
}

// ----------------------------------------------------------------------
// Measure documents
// ----------------------------------------------------------------------

/// Inline lattice or a free-form identifier resolved by the caller.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Inline(LatticeDoc),
    Id(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MeasureDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeRef>,
    /// Total value map keyed by element label.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    /// Atom weights keyed by atom label; completed by additivity.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub atom_values: BTreeMap<String, f64>,
}

impl MeasureDoc {
    pub fn from_values(lattice: &FiniteOrthoLattice, values: &[f64]) -> Self {
        MeasureDoc {
            lattice: None,
            values: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (lattice.label(i as u32).to_string(), v))
                .collect(),
            atom_values: BTreeMap::new(),
        }
    }

    /// The inline lattice, when one is embedded in the document.
    pub fn inline_lattice(&self) -> Result<Option<FiniteOrthoLattice>, IoError> {
        match &self.lattice {
            Some(LatticeRef::Inline(doc)) => Ok(Some(doc.to_lattice()?)),
            _ => Ok(None),
        }
    }

    /// Resolve the document against a lattice into a total value vector.
    pub fn resolve_values(&self, lattice: &FiniteOrthoLattice) -> Result<Vec<f64>, IoError> {
        if !self.values.is_empty() {
            for label in self.values.keys() {
                if lattice.index_of(label).is_none() {
                    return Err(IoError::UnknownLabel(label.clone()));
                }
            }
            return lattice
                .labels()
                .iter()
                .map(|label| {
                    self.values
                        .get(label)
                        .copied()
                        .ok_or_else(|| IoError::MissingValue(label.clone()))
                })
                .collect();
        }
        if self.atom_values.is_empty() {
            return Err(IoError::EmptyMeasure);
        }
        let weights = self.resolve_atom_weights(lattice)?;
        let g = GeneralizedMeasure::from_atom_weights(
            Arc::new(lattice.clone()),
            &weights,
        )?;
        Ok(g.values().to_vec())
    }

    /// Atom weights in canonical atom order.
    pub fn resolve_atom_weights(&self, lattice: &FiniteOrthoLattice) -> Result<Vec<f64>, IoError> {
        for label in self.atom_values.keys() {
            if lattice.index_of(label).is_none() {
                return Err(IoError::UnknownLabel(label.clone()));
            }
        }
        lattice
            .atoms()
            .iter()
            .map(|&a| {
                let label = lattice.label(a);
                self.atom_values
                    .get(label)
                    .copied()
                    .ok_or_else(|| IoError::MissingValue(label.to_string()))
            })
            .collect()
    }

    pub fn to_classical(&self, lattice: Arc<FiniteOrthoLattice>) -> Result<ClassicalMeasure, IoError> {
        let values = self.resolve_values(&lattice)?;
        Ok(ClassicalMeasure::new(lattice, values)?)
    }

    pub fn to_generalized(
        &self,
        lattice: Arc<FiniteOrthoLattice>,
    ) -> Result<GeneralizedMeasure, IoError> {
        let values = self.resolve_values(&lattice)?;
        Ok(GeneralizedMeasure::new(lattice, values)?)
    }
}

// ----------------------------------------------------------------------
// Question documents (JSON-lines streaming output)
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    pub carrier: Vec<String>,
}

// ----------------------------------------------------------------------
// Violation records
// ----------------------------------------------------------------------

/// Machine-readable validation failure: which rule, which elements, how
/// far off.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub rule: String,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Violation {
    fn new(rule: &str, witnesses: Vec<String>, residual: Option<f64>) -> Self {
        Violation { rule: rule.to_string(), witnesses, residual }
    }
}

impl From<&MeasureError> for Violation {
    fn from(e: &MeasureError) -> Self {
        match e {
            MeasureError::NormalizationError { what, residual } => {
                Violation::new("normalization", vec![what.clone()], Some(*residual))
            }
            MeasureError::ComplementRuleViolation { element, residual } => {
                Violation::new("complement-rule", vec![element.clone()], Some(*residual))
            }
            MeasureError::AdditivityViolation { a, b, residual } => {
                Violation::new("additivity", vec![a.clone(), b.clone()], Some(*residual))
            }
            MeasureError::OrthoAdditivityViolation { family, residual } => Violation::new(
                "ortho-additivity",
                family.split(", ").map(str::to_string).collect(),
                Some(*residual),
            ),
            MeasureError::ValueOutOfRange { element, value } => {
                Violation::new("value-range", vec![element.clone()], Some(*value))
            }
            MeasureError::NotBoolean => Violation::new("boolean-lattice", Vec::new(), None),
            MeasureError::NotABlock => Violation::new("block-membership", Vec::new(), None),
            MeasureError::ConditionOnNull { element, mass } => {
                Violation::new("condition-on-null", vec![element.clone()], Some(*mass))
            }
            MeasureError::Lattice(inner) => inner.into(),
            MeasureError::Hilbert(inner) => inner.into(),
            other => Violation::new("input", vec![other.to_string()], None),
        }
    }
}

impl From<&LatticeError> for Violation {
    fn from(e: &LatticeError) -> Self {
        match e {
            LatticeError::NotALattice { reason } => {
                Violation::new("lattice", vec![reason.clone()], None)
            }
            LatticeError::OrthoAxiomViolation { axiom, witness } => {
                Violation::new(&format!("orthocomplementation:{axiom}"), vec![witness.clone()], None)
            }
            LatticeError::NotOrthomodular { a, b } => {
                Violation::new("orthomodularity", vec![a.clone(), b.clone()], None)
            }
            LatticeError::NotAtomic(x) => Violation::new("atomicity", vec![x.clone()], None),
            other => Violation::new("input", vec![other.to_string()], None),
        }
    }
}

impl From<&HilbertError> for Violation {
    fn from(e: &HilbertError) -> Self {
        match e {
            HilbertError::NotHermitian { max_asymmetry } => {
                Violation::new("hermitian", Vec::new(), Some(*max_asymmetry))
            }
            HilbertError::NotPositive { eigenvalue } => {
                Violation::new("positive-semidefinite", Vec::new(), Some(*eigenvalue))
            }
            HilbertError::TraceNotOne { trace } => {
                Violation::new("unit-trace", Vec::new(), Some((trace - 1.0).abs()))
            }
            HilbertError::NotIdempotent { residual } => {
                Violation::new("idempotent", Vec::new(), Some(*residual))
            }
            HilbertError::FrameInvalid { reason } => {
                Violation::new("frame", vec![reason.clone()], None)
            }
            HilbertError::ExperimentInvalid { reason } => {
                Violation::new("experiment", vec![reason.clone()], None)
            }
            other => Violation::new("input", vec![other.to_string()], None),
        }
    }
}

impl From<&IoError> for Violation {
    fn from(e: &IoError) -> Self {
        match e {
            IoError::Lattice(inner) => inner.into(),
            IoError::Hilbert(inner) => inner.into(),
            IoError::Measure(inner) => inner.into(),
            other => Violation::new("input", vec![other.to_string()], None),
        }
    }
}
