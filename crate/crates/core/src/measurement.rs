//! POVMs, single-copy measurement simulation, the Helstrom and pretty good
//! measurement constructions, majority-vote amplification and the Helstrom
//! oracle used by every reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::CopyLedger;
use crate::numerics::{
    self, hermitian_deviation, ComplexMatrix, ComplexVector, RandomSource, C64, HERMITIAN_TOL, PSD_CLAMP_TOL,
};
use crate::states::{class_mixture, DensityMatrix, Label, PureState, QuantumDataset, NEGATIVE, POSITIVE};

/// Tolerance on `|sum_o E_o - I|` for a valid POVM.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Eigenvalues of `p+ rho+ - p- rho-` at or below this go to the negative outcome.
pub const HELSTROM_ZERO_TOL: f64 = 1e-10;
/// Rank cut-off used for `rho^{-1/2}` in the pretty good measurement.
pub const PGM_RANK_TOL: f64 = 1e-10;
const PRIOR_TOL: f64 = 1e-9;
const RENORMALIZE_TOL: f64 = 1e-6;

/// Anything whose outcome statistics under a POVM element can be computed.
pub trait Measurable {
    fn dim(&self) -> usize;
    /// `Tr(op rho)` for Hermitian `op`.
    fn expectation(&self, op: &ComplexMatrix) -> f64;
}

impl Measurable for PureState {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }
    fn expectation(&self, op: &ComplexMatrix) -> f64 {
        numerics::expectation(op, self.amplitudes())
    }
}

impl Measurable for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }
    fn expectation(&self, op: &ComplexMatrix) -> f64 {
        numerics::trace_product(op, self.matrix())
    }
}

/// Finite POVM with one class label per outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmFile", into = "PovmFile")]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

impl Povm {
    /// Validates positivity of each element and completeness, both within 1e-9.
    pub fn new(elements: Vec<ComplexMatrix>, labels: Vec<Label>) -> Result<Self> {
        if elements.is_empty() || elements.len() != labels.len() {
            return Err(Error::InvalidPovm(format!(
                "{} elements for {} labels",
                elements.len(),
                labels.len()
            )));
        }
        let mut seen = labels.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::InvalidPovm("duplicate outcome labels".into()));
        }
        let dim = elements[0].nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            if e.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.nrows().max(e.ncols()),
                });
            }
            let deviation = hermitian_deviation(e);
            if !(deviation <= HERMITIAN_TOL) {
                return Err(Error::NotHermitian { deviation });
            }
            let min = numerics::hermitian_eigen(e)?.min_eigenvalue();
            if min < -PSD_CLAMP_TOL {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
            sum += e;
        }
        let defect = numerics::max_abs_diff(&sum, &numerics::identity(dim));
        if !(defect <= COMPLETENESS_TOL) {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { elements, labels })
    }

    /// Projective measurement in the computational basis, outcome `i` labeled `labels[i]`.
    pub fn computational(labels: Vec<Label>) -> Result<Self> {
        let dim = labels.len();
        let elements = (0..dim)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                m[(i, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        Self::new(elements, labels)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn element_for(&self, label: Label) -> Option<&ComplexMatrix> {
        self.labels.iter().position(|&l| l == label).map(|i| &self.elements[i])
    }

    /// Same elements under new outcome labels.
    pub fn relabel(&self, labels: Vec<Label>) -> Result<Self> {
        Self::new(self.elements.clone(), labels)
    }

    /// Outcome probabilities `Tr(E_o rho)`, clipped to `[0, 1]` and
    /// renormalized; a sum more than 1e-6 away from one is an error.
    pub fn probabilities<S: Measurable + ?Sized>(&self, state: &S) -> Result<Vec<f64>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        let raw: Vec<f64> = self
            .elements
            .iter()
            .map(|e| state.expectation(e).clamp(0.0, 1.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        if !((sum - 1.0).abs() <= RENORMALIZE_TOL) {
            return Err(Error::NumericalBreakdown { sum });
        }
        Ok(raw.into_iter().map(|p| p / sum).collect())
    }

    /// Probability that the measurement outputs `label`.
    pub fn probability_of<S: Measurable + ?Sized>(&self, state: &S, label: Label) -> Result<f64> {
        let probs = self.probabilities(state)?;
        let i = self
            .labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::LabelMismatch(label))?;
        Ok(probs[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PovmFile {
    labels: Vec<Label>,
    elements: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<Povm> for PovmFile {
    fn from(p: Povm) -> Self {
        let elements = p
            .elements
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            labels: p.labels,
            elements,
        }
    }
}

impl TryFrom<PovmFile> for Povm {
    type Error = Error;

    fn try_from(f: PovmFile) -> Result<Self> {
        let elements = f
            .elements
            .iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidPovm("element is not square".into()));
                }
                Ok(ComplexMatrix::from_fn(n, n, |r, c| {
                    C64::new(rows[r][c][0], rows[r][c][1])
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(elements, f.labels)
    }
}

/// Exact misclassification probability of `povm` on an ensemble of
/// `(label, prior, state)` triples: `1 - sum_i p_i Tr(E_{y_i} rho_i)`.
pub fn ensemble_error<S: Measurable>(povm: &Povm, ensemble: &[(Label, f64, &S)]) -> Result<f64> {
    let mut success = 0.0;
    for &(label, prior, state) in ensemble {
        let e = povm.element_for(label).ok_or(Error::LabelMismatch(label))?;
        success += prior * state.expectation(e);
    }
    Ok((1.0 - success).clamp(0.0, 1.0))
}

fn check_priors(priors: &[f64]) -> Result<()> {
    if priors.iter().any(|p| !(*p >= -PRIOR_TOL && *p <= 1.0 + PRIOR_TOL)) {
        return Err(Error::InvalidPrior(format!("{priors:?}")));
    }
    let total: f64 = priors.iter().sum();
    if !((total - 1.0).abs() <= PRIOR_TOL) {
        return Err(Error::InvalidPrior(format!("priors sum to {total}")));
    }
    Ok(())
}

/// Optimal two-outcome measurement: `Pi_+` projects onto the strictly
/// positive eigenspace of `p+ rho+ - p- rho-`, `Pi_- = I - Pi_+`.
/// Outcomes are labeled `-1`, `+1`.
pub fn helstrom_binary(rho_minus: &DensityMatrix, rho_plus: &DensityMatrix, p_minus: f64, p_plus: f64) -> Result<Povm> {
    if rho_minus.dim() != rho_plus.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_minus.dim(),
            found: rho_plus.dim(),
        });
    }
    check_priors(&[p_minus, p_plus])?;
    let delta = rho_plus.matrix().scale(p_plus) - rho_minus.matrix().scale(p_minus);
    let eig = numerics::hermitian_eigen(&delta)?;
    let pi_plus = eig.map_eigenvalues(|l| if l > HELSTROM_ZERO_TOL { 1.0 } else { 0.0 });
    let pi_minus = numerics::identity(delta.nrows()) - &pi_plus;
    Povm::new(vec![pi_minus, pi_plus], vec![NEGATIVE, POSITIVE])
}

/// Helstrom measurement for a weighted binary dataset, built from the
/// weight-normalized class mixtures. Minimizes `sum_i w_i Prob(f(psi_i) != y_i)`.
pub fn helstrom_weighted(ds: &QuantumDataset) -> Result<Povm> {
    if !ds.is_binary() {
        return Err(Error::InvalidDataset(format!(
            "expected labels [-1, 1], found {:?}",
            ds.label_set()
        )));
    }
    ds.normalized_weights()?;
    let (rho_minus, p_minus) = class_mixture(ds, NEGATIVE)?;
    let (rho_plus, p_plus) = class_mixture(ds, POSITIVE)?;
    helstrom_binary(&rho_minus, &rho_plus, p_minus, p_plus)
}

/// Pretty good measurement with outcomes labeled `1..=k`.
pub fn pgm(states: &[DensityMatrix], priors: &[f64]) -> Result<Povm> {
    let labels = (1..=states.len() as Label).collect::<Vec<_>>();
    pgm_labeled(states, priors, &labels)
}

/// `E_i = rho^{-1/2} p_i rho_i rho^{-1/2}` with `rho = sum_i p_i rho_i` and
/// the inverse square root taken on the support of `rho`. The complement of
/// the support is added to the element of the largest prior (lowest label on
/// ties) so the elements sum to the identity.
pub fn pgm_labeled(states: &[DensityMatrix], priors: &[f64], labels: &[Label]) -> Result<Povm> {
    if states.is_empty() || states.len() != priors.len() || states.len() != labels.len() {
        return Err(Error::InvalidPrior(format!(
            "{} states, {} priors, {} labels",
            states.len(),
            priors.len(),
            labels.len()
        )));
    }
    check_priors(priors)?;
    let dim = states[0].dim();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for (s, &p) in states.iter().zip(priors) {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        rho += s.matrix().scale(p);
    }
    let inv_sqrt = numerics::pinv_sqrt(&rho, PGM_RANK_TOL)?;
    let mut elements: Vec<ComplexMatrix> = states
        .iter()
        .zip(priors)
        .map(|(s, &p)| {
            let e = &inv_sqrt * s.matrix().scale(p) * &inv_sqrt;
            (&e + e.adjoint()).scale(0.5)
        })
        .collect();
    let total = elements.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, e| acc + e);
    let residual = numerics::identity(dim) - total;
    let target = (0..states.len())
        .max_by(|&a, &b| priors[a].total_cmp(&priors[b]).then_with(|| labels[b].cmp(&labels[a])))
        .expect("non-empty ensemble");
    elements[target] += residual;
    Povm::new(elements, labels.to_vec())
}

/// Samples one outcome with probability `Tr(E_o rho)`, consuming one copy of
/// the unknown state.
pub fn measure<S: Measurable + ?Sized>(
    povm: &Povm,
    state: &S,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<Label> {
    let probs = povm.probabilities(state)?;
    ledger.consume_unknown(1)?;
    Ok(povm.labels()[rng.categorical(&probs)])
}

/// Binary majority with ties resolved toward `-1`.
pub fn majority_vote(votes: &[Label]) -> Label {
    let plus = votes.iter().filter(|&&v| v == POSITIVE).count();
    let minus = votes.iter().filter(|&&v| v == NEGATIVE).count();
    if plus > minus {
        POSITIVE
    } else {
        NEGATIVE
    }
}

/// Measures `copies` fresh copies and returns the majority outcome.
pub fn majority_repeat<S: Measurable + ?Sized>(
    povm: &Povm,
    state: &S,
    copies: u64,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<Label> {
    if copies.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "majority needs an odd copy count, got {copies}"
        )));
    }
    if let Some(remaining) = ledger.remaining_unknown() {
        if remaining < copies {
            return Err(Error::BudgetExhausted {
                holder: crate::ledger::Holder::Unknown,
                requested: copies,
                remaining,
            });
        }
    }
    let votes = (0..copies)
        .map(|_| measure(povm, state, rng, ledger))
        .collect::<Result<Vec<_>>>()?;
    Ok(majority_vote(&votes))
}

/// Anything that turns a binary dataset into a binary classifier POVM while
/// charging the ledger for the copies it uses.
pub trait BinaryLearner {
    fn learn(&self, ds: &QuantumDataset, ledger: &mut CopyLedger) -> Result<Povm>;
    /// Copies of each training state consumed by one call.
    fn copies_per_call(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVersion {
    /// Works from classical descriptions; training is free.
    V1,
    /// Consumes `t_bin` copies of every training state per call.
    V2 { t_bin: u64 },
}

/// Returns the exact weighted Helstrom measurement. Version 2 is a stand-in
/// for a copy-based learner: the POVM is still exact, but every call debits
/// `t_bin` copies of each state in the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelstromOracle {
    pub version: OracleVersion,
}

impl HelstromOracle {
    pub fn v1() -> Self {
        Self {
            version: OracleVersion::V1,
        }
    }

    pub fn v2(t_bin: u64) -> Self {
        Self {
            version: OracleVersion::V2 { t_bin },
        }
    }
}

impl BinaryLearner for HelstromOracle {
    fn learn(&self, ds: &QuantumDataset, ledger: &mut CopyLedger) -> Result<Povm> {
        if let OracleVersion::V2 { t_bin } = self.version {
            ledger.consume_training_all(ds.ids(), t_bin)?;
        }
        helstrom_weighted(ds)
    }

    fn copies_per_call(&self) -> u64 {
        match self.version {
            OracleVersion::V1 => 0,
            OracleVersion::V2 { t_bin } => t_bin,
        }
    }
}

/// One oracle call on a binary dataset.
pub fn oracle_call(oracle: &HelstromOracle, ds: &QuantumDataset, ledger: &mut CopyLedger) -> Result<Povm> {
    oracle.learn(ds, ledger)
}

/// Random two-outcome POVM `{E, I - E}` with `E = sum_k c_k |u_k><u_k|`:
/// orthonormal `u_k` of random rank (Gram-Schmidt on complex Gaussian
/// vectors) and weights `c_k` uniform on `[0, 1]`, or exactly 1 half the
/// time so that projective measurements are sampled too.
pub fn random_binary_povm(dim: usize, rng: &mut RandomSource) -> Result<Povm> {
    let rank = rng.index(dim + 1);
    let projective = rng.bernoulli(0.5);
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(rank);
    let mut e = ComplexMatrix::zeros(dim, dim);
    while basis.len() < rank {
        let mut v = ComplexVector::from_fn(dim, |_, _| rng.complex_normal());
        for u in &basis {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        v.unscale_mut(norm);
        let c = if projective { 1.0 } else { rng.uniform() };
        e += numerics::outer(&v).scale(c);
        basis.push(v);
    }
    let rest = numerics::identity(dim) - &e;
    Povm::new(vec![e, rest], vec![NEGATIVE, POSITIVE])
}
