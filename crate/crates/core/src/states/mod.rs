//! Pure states, density matrices, labeled datasets and the distance measures
//! used to compare training states.

mod io;

pub use io::{dataset_from_json, dataset_to_json, load_dataset, save_dataset};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ledger::CopyMode;
use crate::numerics::{self, hermitian_deviation, ComplexMatrix, ComplexVector, RandomSource, C64, HERMITIAN_TOL};

/// Class identifier. Binary tasks use `-1` / `+1`, multiclass tasks `1..=k`.
pub type Label = i32;

pub const NEGATIVE: Label = -1;
pub const POSITIVE: Label = 1;

const NORM_TOL: f64 = 1e-9;

/// A normalized state vector on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Wraps an amplitude vector whose norm is already 1 (within 1e-9).
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        check_power_of_two(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        check_power_of_two(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::normalized(ComplexVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim && dim.is_power_of_two());
        let mut amplitudes = ComplexVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `(|0> + |1>) / sqrt 2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: ComplexVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> u32 {
        self.dim().trailing_zeros()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Multiplies by the global phase `e^{i theta}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.map(|a| a * C64::from_polar(1.0, theta)),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> ComplexMatrix {
        numerics::outer(&self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.projector(),
        }
    }
}

fn check_power_of_two(dim: usize) -> Result<()> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    Ok(())
}

fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Unit-trace Hermitian PSD operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, each within 1e-9.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = numerics::trace(&matrix).re;
        if !((tr - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidState(format!("density matrix trace {tr} != 1")));
        }
        let min = numerics::hermitian_eigen(&matrix)?.min_eigenvalue();
        if min < -numerics::PSD_CLAMP_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { matrix })
    }

    /// Convex combination `sum_i p_i |psi_i><psi_i|`; the weights are normalized.
    pub fn mixture<'a>(components: impl IntoIterator<Item = (f64, &'a PureState)>) -> Result<Self> {
        let mut matrix: Option<ComplexMatrix> = None;
        let mut total = 0.0;
        for (w, state) in components {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidPrior(format!("mixture weight {w}")));
            }
            total += w;
            let m = matrix.get_or_insert_with(|| ComplexMatrix::zeros(state.dim(), state.dim()));
            check_same_dim(m.nrows(), state.dim())?;
            if w > 0.0 {
                *m += state.projector().scale(w);
            }
        }
        let matrix = matrix.ok_or_else(|| Error::InvalidState("empty mixture".to_string()))?;
        if total <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        Ok(Self {
            matrix: matrix.unscale(total),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: numerics::identity(dim).unscale(dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(state: &PureState) -> Self {
        state.to_density()
    }
}

/// One training example. `id` is the index used by the copy ledger and is
/// preserved when datasets are resampled or relabeled.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub id: usize,
    pub state: PureState,
    pub label: Label,
    pub weight: f64,
}

/// Labeled, weighted collection of pure training states.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDataset {
    items: Vec<LabeledState>,
    label_set: Vec<Label>,
    declared_copies: CopyMode,
}

impl QuantumDataset {
    pub fn new(items: Vec<LabeledState>, label_set: Vec<Label>, declared_copies: CopyMode) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        };
        let dim = first.state.dim();
        let labels: BTreeSet<Label> = label_set.iter().copied().collect();
        if labels.len() != label_set.len() {
            return Err(Error::InvalidDataset("duplicate entries in label set".into()));
        }
        for item in &items {
            check_same_dim(dim, item.state.dim())?;
            if !labels.contains(&item.label) {
                return Err(Error::InvalidDataset(format!(
                    "label {} is not in the label set",
                    item.label
                )));
            }
            if !(item.weight >= 0.0 && item.weight.is_finite()) {
                return Err(Error::InvalidDataset(format!("invalid weight {}", item.weight)));
            }
        }
        if let CopyMode::Finite(0) = declared_copies {
            return Err(Error::InvalidDataset("declared copies must be positive".into()));
        }
        Ok(Self {
            items,
            label_set: labels.into_iter().collect(),
            declared_copies,
        })
    }

    /// Uniformly weighted (standard) dataset with ids `0..n` and the label set
    /// inferred from the items.
    pub fn from_labeled(states: Vec<(PureState, Label)>, declared_copies: CopyMode) -> Result<Self> {
        let n = states.len() as f64;
        let label_set = states.iter().map(|(_, l)| *l).collect::<BTreeSet<_>>();
        let items = states
            .into_iter()
            .enumerate()
            .map(|(id, (state, label))| LabeledState {
                id,
                state,
                label,
                weight: 1.0 / n,
            })
            .collect();
        Self::new(items, label_set.into_iter().collect(), declared_copies)
    }

    /// Like [`QuantumDataset::from_labeled`] with explicit weights.
    pub fn from_weighted(states: Vec<(PureState, Label, f64)>, declared_copies: CopyMode) -> Result<Self> {
        let label_set = states.iter().map(|(_, l, _)| *l).collect::<BTreeSet<_>>();
        let items = states
            .into_iter()
            .enumerate()
            .map(|(id, (state, label, weight))| LabeledState {
                id,
                state,
                label,
                weight,
            })
            .collect();
        Self::new(items, label_set.into_iter().collect(), declared_copies)
    }

    pub fn items(&self) -> &[LabeledState] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].state.dim()
    }

    pub fn qubits(&self) -> u32 {
        self.items[0].state.qubits()
    }

    pub fn label_set(&self) -> &[Label] {
        &self.label_set
    }

    pub fn declared_copies(&self) -> CopyMode {
        self.declared_copies
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + Clone + '_ {
        self.items.iter().map(|i| i.id)
    }

    pub fn is_binary(&self) -> bool {
        self.label_set == [NEGATIVE, POSITIVE]
    }

    /// All weights equal `1/n`.
    pub fn is_standard(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.items.iter().all(|i| (i.weight - u).abs() <= 1e-12)
    }

    /// `p_i = w_i / sum_j w_j`.
    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        let total: f64 = self.items.iter().map(|i| i.weight).sum();
        if total <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        Ok(self.items.iter().map(|i| i.weight / total).collect())
    }

    /// Total normalized weight per label, in label-set order.
    pub fn priors(&self) -> Result<Vec<(Label, f64)>> {
        let p = self.normalized_weights()?;
        Ok(self
            .label_set
            .iter()
            .map(|&l| {
                let prior = self
                    .items
                    .iter()
                    .zip(&p)
                    .filter(|(i, _)| i.label == l)
                    .map(|(_, w)| w)
                    .sum();
                (l, prior)
            })
            .collect())
    }

    pub fn class_size(&self, label: Label) -> usize {
        self.items.iter().filter(|i| i.label == label).count()
    }

    /// Labels that carry at least one item.
    pub fn present_labels(&self) -> Vec<Label> {
        self.label_set
            .iter()
            .copied()
            .filter(|&l| self.class_size(l) > 0)
            .collect()
    }

    /// Same states with all weights set to `1/n`.
    pub fn uniform(&self) -> Self {
        let u = 1.0 / self.len() as f64;
        let mut out = self.clone();
        out.items.iter_mut().for_each(|i| i.weight = u);
        out
    }

    /// Keeps the items at the given positions with a replacement label set.
    pub fn select(&self, positions: &[usize], label_set: Vec<Label>) -> Result<Self> {
        let items = positions.iter().map(|&p| self.items[p].clone()).collect();
        Self::new(items, label_set, self.declared_copies)
    }

    /// Applies `relabel` to every item's label.
    pub fn relabel(&self, label_set: Vec<Label>, relabel: impl Fn(&LabeledState) -> Label) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|i| LabeledState {
                label: relabel(i),
                ..i.clone()
            })
            .collect();
        Self::new(items, label_set, self.declared_copies)
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: weights.len(),
            });
        }
        let items = self
            .items
            .iter()
            .zip(weights)
            .map(|(i, &w)| LabeledState { weight: w, ..i.clone() })
            .collect();
        Self::new(items, self.label_set.clone(), self.declared_copies)
    }

    pub fn with_declared_copies(mut self, copies: CopyMode) -> Self {
        self.declared_copies = copies;
        self
    }
}

/// Squared overlap `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Amplitude overlap `|<a|b>|`.
pub fn overlap_magnitude(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// `sqrt(sum_i |a_i - b_i|^2)`; phase sensitive, in `[0, 2]`.
pub fn euclidean_distance(a: &PureState, b: &PureState) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    Ok((a.amplitudes() - b.amplitudes()).norm())
}

/// Weight-proportional mixture of one class and its prior.
pub fn class_mixture(ds: &QuantumDataset, label: Label) -> Result<(DensityMatrix, f64)> {
    let p = ds.normalized_weights()?;
    let members: Vec<(f64, &PureState)> = ds
        .items()
        .iter()
        .zip(&p)
        .filter(|(i, _)| i.label == label)
        .map(|(i, &w)| (w, &i.state))
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyClass(label));
    }
    let prior: f64 = members.iter().map(|(w, _)| w).sum();
    let mixture = if prior > 0.0 {
        DensityMatrix::mixture(members)?
    } else {
        // zero-weight class: its shape is irrelevant to any weighted objective
        DensityMatrix::mixture(members.into_iter().map(|(_, s)| (1.0, s)))?
    };
    Ok((mixture, prior))
}

/// Haar-random state: a normalized complex Gaussian vector.
pub fn haar_random_state(qubits: u32, rng: &mut RandomSource) -> Result<PureState> {
    if !(1..=10).contains(&qubits) {
        return Err(Error::InvalidConfig(format!("qubit count {qubits} outside 1..=10")));
    }
    let dim = 1usize << qubits;
    loop {
        let v = ComplexVector::from_fn(dim, |_, _| rng.complex_normal());
        if v.norm() > 1e-12 {
            return PureState::normalized(v);
        }
    }
}

/// Von Neumann entropy (bits) of the reduced state on the first `left_qubits` qubits.
pub fn entanglement_entropy(state: &PureState, left_qubits: u32) -> Result<f64> {
    let total = state.qubits();
    if left_qubits == 0 || left_qubits >= total {
        return Err(Error::InvalidConfig(format!(
            "cannot split {total} qubits after {left_qubits}"
        )));
    }
    let rows = 1usize << left_qubits;
    let cols = 1usize << (total - left_qubits);
    let m = ComplexMatrix::from_fn(rows, cols, |r, c| state.amplitudes()[r * cols + c]);
    let reduced = &m * m.adjoint();
    let eig = numerics::hermitian_eigen(&reduced)?;
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum())
}
