//! Synthetic dataset generation.

use qsclass_core::numerics::ComplexVector;
use qsclass_core::states::{entanglement_entropy, haar_random_state, Label, NEGATIVE, POSITIVE};
use qsclass_core::{Error, PureState, QuantumDataset, RandomSource, Result};

use crate::config::{DatasetSource, GeneratorSpec, WeightScheme};

/// Entangled states of the preset have at least this much entanglement
/// entropy (bits) across the qubit cut.
pub const MIN_ENTANGLEMENT: f64 = 0.1;

/// Product states are drawn with exactly zero entropy, so this is only a
/// numerical allowance for the check.
pub const PRODUCT_ENTROPY_TOL: f64 = 1e-9;

/// Class labels for `k` classes: `[-1, 1]` when binary, else `1..=k`.
pub fn class_labels(k: usize) -> Vec<Label> {
    if k == 2 {
        vec![NEGATIVE, POSITIVE]
    } else {
        (1..=k as Label).collect()
    }
}

fn product_state(rng: &mut RandomSource) -> Result<PureState> {
    let a = haar_random_state(1, rng)?;
    let b = haar_random_state(1, rng)?;
    let amps = a.amplitudes().kronecker(b.amplitudes());
    PureState::normalized(ComplexVector::from_column_slice(amps.as_slice()))
}

fn entangled_state(rng: &mut RandomSource) -> Result<PureState> {
    loop {
        let s = haar_random_state(2, rng)?;
        if entanglement_entropy(&s, 1)? > MIN_ENTANGLEMENT {
            return Ok(s);
        }
    }
}

/// Draws a dataset. Item `i` of a Haar dataset gets class `i mod k`, so every
/// class is populated once `n >= k`.
pub fn generate(spec: &GeneratorSpec, rng: &mut RandomSource) -> Result<QuantumDataset> {
    match *spec {
        GeneratorSpec::Haar {
            qubits,
            classes,
            states,
            weights,
            copies,
        } => {
            if classes < 2 {
                return Err(Error::InvalidConfig(format!("need at least 2 classes, got {classes}")));
            }
            if states < classes {
                return Err(Error::InvalidConfig(format!(
                    "{states} states cannot populate {classes} classes"
                )));
            }
            let labels = class_labels(classes);
            let mut items = Vec::with_capacity(states);
            for i in 0..states {
                let state = haar_random_state(qubits, rng)?;
                let weight = match weights {
                    WeightScheme::Uniform => 1.0 / states as f64,
                    WeightScheme::Random => 0.1 + 0.9 * rng.uniform(),
                };
                items.push((state, labels[i % classes], weight));
            }
            QuantumDataset::from_weighted(items, copies)
        }
        GeneratorSpec::EntangledVsSeparable { states, copies } => {
            if states < 2 {
                return Err(Error::InvalidConfig("the preset needs at least 2 states".into()));
            }
            let entangled = states.div_ceil(2);
            let mut items = Vec::with_capacity(states);
            for i in 0..states {
                items.push(if i < entangled {
                    (entangled_state(rng)?, NEGATIVE)
                } else {
                    (product_state(rng)?, POSITIVE)
                });
            }
            QuantumDataset::from_labeled(items, copies)
        }
    }
}

/// Loads or generates the dataset of a run. Generation uses substream 0 of
/// the run seed.
pub fn resolve(source: &DatasetSource, seed: u64) -> Result<QuantumDataset> {
    match source {
        DatasetSource::File(path) => qsclass_core::states::load_dataset(path),
        DatasetSource::Generated(spec) => generate(spec, &mut RandomSource::substream(seed, 0)),
    }
}
