//! JSON dataset files.
//!
//! ```json
//! { "qubits": 1, "labels": [-1, 1], "declared_copies": "classical",
//!   "items": [ { "label": -1, "weight": 0.5, "amplitudes": [[1, 0], [0, 0]] } ] }
//! ```
//!
//! Numbers may be JSON doubles or decimal strings. Amplitude vectors are
//! renormalized when their norm is within 1e-6 of one and rejected otherwise.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Label, LabeledState, PureState, QuantumDataset};
use crate::error::{Error, Result};
use crate::ledger::CopyMode;
use crate::numerics::{ComplexVector, C64};

const LOAD_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Double(f64),
    Decimal(String),
}

impl Number {
    fn value(&self) -> Result<f64> {
        match self {
            Number::Double(x) => Ok(*x),
            Number::Decimal(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidDataset(format!("bad number {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum DeclaredCopies {
    Finite(u64),
    Marker(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ItemFile {
    label: Label,
    weight: Number,
    amplitudes: Vec<[Number; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DatasetFile {
    qubits: u32,
    labels: Vec<Label>,
    declared_copies: DeclaredCopies,
    items: Vec<ItemFile>,
}

fn parse(file: DatasetFile) -> Result<QuantumDataset> {
    if !(1..=10).contains(&file.qubits) {
        return Err(Error::InvalidDataset(format!("qubit count {}", file.qubits)));
    }
    let dim = 1usize << file.qubits;
    let declared = match file.declared_copies {
        DeclaredCopies::Finite(s) => CopyMode::Finite(s),
        DeclaredCopies::Marker(ref m) if m.eq_ignore_ascii_case("classical") => CopyMode::Classical,
        DeclaredCopies::Marker(m) => return Err(Error::InvalidDataset(format!("declared_copies {m:?}"))),
    };
    let mut items = Vec::with_capacity(file.items.len());
    for (id, item) in file.items.into_iter().enumerate() {
        if item.amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: item.amplitudes.len(),
            });
        }
        let amps = item
            .amplitudes
            .iter()
            .map(|[re, im]| Ok(C64::new(re.value()?, im.value()?)))
            .collect::<Result<Vec<_>>>()?;
        let v = ComplexVector::from_vec(amps);
        let norm = v.norm();
        if !((norm - 1.0).abs() <= LOAD_NORM_TOL) {
            return Err(Error::InvalidDataset(format!(
                "item {id} has norm {norm}, beyond renormalization tolerance"
            )));
        }
        items.push(LabeledState {
            id,
            state: PureState::normalized(v)?,
            label: item.label,
            weight: item.weight.value()?,
        });
    }
    QuantumDataset::new(items, file.labels, declared)
}

fn render(ds: &QuantumDataset) -> DatasetFile {
    DatasetFile {
        qubits: ds.qubits(),
        labels: ds.label_set().to_vec(),
        declared_copies: match ds.declared_copies() {
            CopyMode::Classical => DeclaredCopies::Marker("classical".into()),
            CopyMode::Finite(s) => DeclaredCopies::Finite(s),
        },
        items: ds
            .items()
            .iter()
            .map(|i| ItemFile {
                label: i.label,
                weight: Number::Double(i.weight),
                amplitudes: i
                    .state
                    .amplitudes()
                    .iter()
                    .map(|a| [Number::Double(a.re), Number::Double(a.im)])
                    .collect(),
            })
            .collect(),
    }
}

pub fn dataset_from_json(text: &str) -> Result<QuantumDataset> {
    parse(serde_json::from_str(text)?)
}

pub fn dataset_to_json(ds: &QuantumDataset) -> Result<String> {
    Ok(serde_json::to_string_pretty(&render(ds))?)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<QuantumDataset> {
    dataset_from_json(&fs::read_to_string(path)?)
}

pub fn save_dataset(ds: &QuantumDataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, dataset_to_json(ds)?)?;
    Ok(())
}
