//! JSON tensor file format.
//!
//! ```json
//! {"n": 2, "d": 3, "format": "sparse",
//!  "entries": [{"idx": [1,1,2], "value": 3.0}],
//!  "symmetric_tail": true}
//! ```
//!
//! Indices are 1-based on disk. Dense files may carry either an `entries`
//! list or a flat row-major `values` array. Sparse entries must have sorted
//! tails and one entry per symmetry class.

use crate::error::{Result, TenspecError};
use crate::tensor::{DenseTensor, Shape, SparseSupportTensor, SupportEntry, Violation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct TensorFile {
    n: usize,
    d: usize,
    format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<EntryJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    symmetric_tail: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryJson {
    idx: Vec<usize>,
    value: f64,
}

/// A tensor loaded from disk, keeping its on-disk representation.
#[derive(Debug, Clone)]
pub enum LoadedTensor {
    Dense(DenseTensor),
    Sparse(SparseSupportTensor),
}

impl LoadedTensor {
    pub fn to_dense(&self) -> DenseTensor {
        match self {
            LoadedTensor::Dense(t) => t.clone(),
            LoadedTensor::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> Result<SparseSupportTensor> {
        match self {
            LoadedTensor::Dense(t) => {
                let sym = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
                SparseSupportTensor::from_dense(&sym)
            }
            LoadedTensor::Sparse(s) => Ok(s.clone()),
        }
    }
}

fn one_based(idx: &[usize], n: usize, d: usize) -> Result<Vec<usize>> {
    if idx.len() != d {
        return Err(TenspecError::Parse(format!(
            "index {:?} does not have length d = {d}",
            idx
        )));
    }
    idx.iter()
        .map(|&i| {
            if i == 0 || i > n {
                Err(TenspecError::Parse(format!(
                    "index {:?} out of 1-based range 1..={n}",
                    idx
                )))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

pub fn parse_tensor_json(text: &str) -> Result<LoadedTensor> {
    let file: TensorFile = serde_json::from_str(text)
        .map_err(|e| TenspecError::Parse(format!("invalid tensor JSON: {e}")))?;
    if file.d < 2 || file.n == 0 {
        return Err(TenspecError::Parse(format!(
            "need n >= 1 and d >= 2, got n = {}, d = {}",
            file.n, file.d
        )));
    }
    match file.format.as_str() {
        "dense" => {
            let shape = Shape::equidimensional(file.n, file.d)?;
            let mut t = if let Some(values) = file.values {
                DenseTensor::new(shape, values, false)?
            } else if let Some(entries) = file.entries {
                let mut t = DenseTensor::zeros(shape);
                let mut seen = std::collections::HashSet::new();
                for e in &entries {
                    let idx = one_based(&e.idx, file.n, file.d)?;
                    if !seen.insert(idx.clone()) {
                        return Err(TenspecError::Parse(format!(
                            "duplicate dense entry at {:?}",
                            e.idx
                        )));
                    }
                    t.set(&idx, e.value);
                }
                t
            } else {
                return Err(TenspecError::Parse(
                    "dense tensor needs either \"entries\" or \"values\"".into(),
                ));
            };
            t.partially_symmetric = file.symmetric_tail;
            let violations = t.validate();
            if !violations.is_empty() {
                return Err(describe_violations(&violations));
            }
            Ok(LoadedTensor::Dense(t))
        }
        "sparse" => {
            let entries = file
                .entries
                .ok_or_else(|| TenspecError::Parse("sparse tensor needs \"entries\"".into()))?;
            let mut support = Vec::with_capacity(entries.len());
            for e in &entries {
                let index = one_based(&e.idx, file.n, file.d)?;
                support.push(SupportEntry { index, value: e.value });
            }
            Ok(LoadedTensor::Sparse(SparseSupportTensor::new(file.n, file.d, support)?))
        }
        other => Err(TenspecError::Parse(format!(
            "unknown format {other:?}, expected \"dense\" or \"sparse\""
        ))),
    }
}

fn describe_violations(violations: &[Violation]) -> TenspecError {
    let mut msgs: Vec<String> = Vec::new();
    for v in violations.iter().take(5) {
        match v {
            Violation::Nonnegativity { index, value } => {
                let idx1: Vec<usize> = index.iter().map(|i| i + 1).collect();
                msgs.push(format!("entry {idx1:?} = {value} is not a nonnegative real"));
            }
            Violation::Symmetry { index, permuted } => {
                let a: Vec<usize> = index.iter().map(|i| i + 1).collect();
                let b: Vec<usize> = permuted.iter().map(|i| i + 1).collect();
                msgs.push(format!("symmetric_tail is set but entries {a:?} and {b:?} differ"));
            }
        }
    }
    if violations.len() > 5 {
        msgs.push(format!("... and {} more", violations.len() - 5));
    }
    TenspecError::Domain(msgs.join("; "))
}

pub fn dense_to_json(t: &DenseTensor) -> Result<String> {
    let (n, d) = t.equi()?;
    let file = TensorFile {
        n,
        d,
        format: "dense".into(),
        entries: None,
        values: Some(t.values().to_vec()),
        symmetric_tail: t.partially_symmetric,
    };
    serde_json::to_string_pretty(&file).map_err(|e| TenspecError::Parse(e.to_string()))
}

pub fn sparse_to_json(s: &SparseSupportTensor) -> Result<String> {
    let entries = s
        .entries()
        .iter()
        .map(|e| EntryJson {
            idx: e.index.iter().map(|i| i + 1).collect(),
            value: e.value,
        })
        .collect();
    let file = TensorFile {
        n: s.n,
        d: s.d,
        format: "sparse".into(),
        entries: Some(entries),
        values: None,
        symmetric_tail: true,
    };
    serde_json::to_string_pretty(&file).map_err(|e| TenspecError::Parse(e.to_string()))
}

/// Parses a vector given either as a JSON array (`[1, 2.5]`) or as a
/// comma-separated list (`1,2.5`).
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)
            .map_err(|e| TenspecError::Parse(format!("invalid vector JSON: {e}")))
    } else {
        trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| TenspecError::Parse(format!("invalid vector component: {e}")))
            })
            .collect()
    }
}
