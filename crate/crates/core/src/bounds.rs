//! Closed-form error formulas and bounds for discriminating an ensemble of
//! pure states, and an audit harness that checks each bound against the
//! exactly computed error of the pretty good measurement.
//!
//! In the audit every state of a dataset is its own hypothesis, with prior
//! equal to its normalized weight.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ledger::{CopyLedger, CopyMode};
use crate::measurement::{pgm, Povm, PGM_RANK_TOL};
use crate::numerics::{self, ComplexMatrix, RandomSource, C64};
use crate::states::{fidelity, haar_random_state, DensityMatrix, Label, PureState, QuantumDataset};
use crate::swap_test::{similarity_matrix, Repetitions, SimilarityMatrix};

/// Slack used when deciding whether a bound holds.
pub const BOUND_TOL: f64 = 1e-9;

/// Optimal two-hypothesis error `1/2 - Tr|p_- rho_- - p_+ rho_+| / 2`.
pub fn helstrom_bound(rho_minus: &DensityMatrix, rho_plus: &DensityMatrix, p_minus: f64, p_plus: f64) -> Result<f64> {
    if rho_minus.dim() != rho_plus.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_minus.dim(),
            found: rho_plus.dim(),
        });
    }
    if !(p_minus >= 0.0 && p_plus >= 0.0 && ((p_minus + p_plus) - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidPrior(format!("({p_minus}, {p_plus})")));
    }
    let gamma = rho_minus.matrix().scale(p_minus) - rho_plus.matrix().scale(p_plus);
    Ok((0.5 - numerics::trace_norm(&gamma)? / 2.0).clamp(0.0, 0.5))
}

/// `1 - sum_i p_i Tr(E_i rho_i)` for a POVM whose element `i` guesses hypothesis `i`.
pub fn ensemble_error_indexed(povm: &Povm, states: &[DensityMatrix], priors: &[f64]) -> Result<f64> {
    let mut success = 0.0;
    for ((e, s), &p) in povm.elements().iter().zip(states).zip(priors) {
        success += p * numerics::trace_product(e, s.matrix());
    }
    Ok((1.0 - success).clamp(0.0, 1.0))
}

/// Exact error of the pretty good measurement on the ensemble.
pub fn pgm_exact_error(states: &[DensityMatrix], priors: &[f64]) -> Result<f64> {
    ensemble_error_indexed(&pgm(states, priors)?, states, priors)
}

/// `1 - (1/n) sum_i 1 / sum_j S(i, j)` on the clamped similarity matrix.
pub fn pgm_fidelity_upper_bound(sim: &SimilarityMatrix) -> f64 {
    let s = sim.clamped();
    let n = s.nrows();
    let total: f64 = s.row_iter().map(|row| 1.0 / row.sum()).sum();
    1.0 - total / n as f64
}

/// Which matrix the eigenvalue bound is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// Squared overlaps `|<psi_i|psi_j>|^2`, value `1 - (1/n)(sum sqrt(lambda))^2`.
    Fidelity,
    /// Prior-weighted overlaps `sqrt(p_i p_j) <psi_i|psi_j>`, value `1 - sum_i ((sqrt G)_ii)^2`.
    WeightedOverlap,
}

impl Interpretation {
    pub fn tag(self) -> &'static str {
        match self {
            Interpretation::Fidelity => "fidelity",
            Interpretation::WeightedOverlap => "weighted_overlap",
        }
    }
}

/// `G_ij = sqrt(p_i p_j) <psi_i|psi_j>`.
pub fn weighted_gram(states: &[&PureState], priors: &[f64]) -> Result<ComplexMatrix> {
    let n = states.len();
    if priors.len() != n {
        return Err(Error::InvalidPrior(format!("{n} states, {} priors", priors.len())));
    }
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = states[i].inner(states[j])? * (priors[i] * priors[j]).sqrt();
        }
    }
    Ok(g)
}

/// The eigenvalue bound for the supplied matrix under `interpretation`.
pub fn pgm_eigenvalue_upper_bound(matrix: &ComplexMatrix, interpretation: Interpretation) -> Result<f64> {
    let deviation = numerics::hermitian_deviation(matrix);
    if deviation > numerics::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = numerics::hermitian_eigen(matrix)?;
    let root = |l: f64| if l > PGM_RANK_TOL { l.sqrt() } else { 0.0 };
    Ok(match interpretation {
        Interpretation::Fidelity => {
            let root_sum: f64 = eig.eigenvalues.iter().map(|&l| root(l)).sum();
            1.0 - root_sum * root_sum / matrix.nrows() as f64
        }
        Interpretation::WeightedOverlap => {
            let sqrt_g = eig.map_eigenvalues(root);
            1.0 - (0..sqrt_g.nrows()).map(|i| sqrt_g[(i, i)].re.powi(2)).sum::<f64>()
        }
    })
}

fn fidelity_as_complex(sim: &SimilarityMatrix) -> ComplexMatrix {
    sim.clamped().map(|x| C64::new(x, 0.0))
}

/// Index range of the pairwise lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRange {
    /// `j > i`.
    Strict,
    /// `j >= i`, diagonal included.
    Literal,
}

impl IndexRange {
    pub fn tag(self) -> &'static str {
        match self {
            IndexRange::Strict => "strict",
            IndexRange::Literal => "literal",
        }
    }
}

/// `sum_i sum_{j > i} p_i p_j S(i, j)` (or `j >= i`) on the clamped matrix.
pub fn pgm_lower_bound(sim: &SimilarityMatrix, priors: &[f64], range: IndexRange) -> Result<f64> {
    let s = sim.clamped();
    let n = s.nrows();
    if priors.len() != n {
        return Err(Error::InvalidPrior(format!("{n} states, {} priors", priors.len())));
    }
    let offset = match range {
        IndexRange::Strict => 1,
        IndexRange::Literal => 0,
    };
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + offset)..n {
            total += priors[i] * priors[j] * s[(i, j)];
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ensemble_id: usize,
    pub bound_name: String,
    pub interpretation: String,
    pub bound_value: f64,
    pub exact_error: f64,
    pub holds: bool,
    pub is_upper: bool,
}

impl BoundReport {
    pub fn new(
        ensemble_id: usize,
        bound_name: &str,
        interpretation: &str,
        bound_value: f64,
        exact_error: f64,
        is_upper: bool,
    ) -> Self {
        let holds = if is_upper {
            exact_error <= bound_value + BOUND_TOL
        } else {
            exact_error >= bound_value - BOUND_TOL
        };
        Self {
            ensemble_id,
            bound_name: bound_name.to_string(),
            interpretation: interpretation.to_string(),
            bound_value,
            exact_error,
            holds,
            is_upper,
        }
    }
}

/// Bound names used in audit reports.
pub mod names {
    pub const HELSTROM_OPTIMALITY: &str = "helstrom_optimality";
    pub const SQUARE_ROOT_SANDWICH: &str = "square_root_sandwich";
    pub const PRIOR_GUESS: &str = "prior_guess";
    pub const FIDELITY_ROW_SUM: &str = "fidelity_row_sum";
    pub const EIGENVALUE: &str = "eigenvalue";
    pub const PAIRWISE_LOWER: &str = "pairwise_lower";
}

/// Evaluates every bound on one ensemble. The similarity matrix is exact or
/// estimated from `repetitions` swap tests; the PGM error is always exact.
///
/// Two-state ensembles additionally get the Helstrom sandwich rows, so the
/// number of rows is 8 for `n = 2` and 6 otherwise.
pub fn audit_bounds(
    ensemble_id: usize,
    ds: &QuantumDataset,
    repetitions: Repetitions,
    rng: &mut RandomSource,
) -> Result<Vec<BoundReport>> {
    if ds.len() < 2 {
        return Err(Error::InvalidDataset("the audit needs at least two states".into()));
    }
    let pure: Vec<&PureState> = ds.items().iter().map(|i| &i.state).collect();
    let states: Vec<DensityMatrix> = pure.iter().map(|s| s.to_density()).collect();
    let priors = ds.normalized_weights()?;
    let exact = pgm_exact_error(&states, &priors)?;

    let mut ledger = CopyLedger::new(CopyMode::Classical);
    let sim = similarity_matrix(ds, repetitions, rng, &mut ledger)?;
    let sim_tag = match repetitions {
        Repetitions::Exact => "row_sum".to_string(),
        Repetitions::Shots(e) => format!("row_sum_e{e}"),
    };

    use names::*;
    let mut out = Vec::with_capacity(8);
    if ds.len() == 2 {
        let opt = helstrom_bound(&states[0], &states[1], priors[0], priors[1])?;
        out.push(BoundReport::new(
            ensemble_id,
            HELSTROM_OPTIMALITY,
            "exact",
            opt,
            exact,
            false,
        ));
        out.push(BoundReport::new(
            ensemble_id,
            SQUARE_ROOT_SANDWICH,
            "exact",
            opt.sqrt(),
            exact,
            true,
        ));
    }
    let max_prior = priors.iter().copied().fold(0.0, f64::max);
    out.push(BoundReport::new(
        ensemble_id,
        PRIOR_GUESS,
        "exact",
        1.0 - max_prior,
        exact,
        true,
    ));
    out.push(BoundReport::new(
        ensemble_id,
        FIDELITY_ROW_SUM,
        &sim_tag,
        pgm_fidelity_upper_bound(&sim),
        exact,
        true,
    ));
    let fid = pgm_eigenvalue_upper_bound(&fidelity_as_complex(&sim), Interpretation::Fidelity)?;
    out.push(BoundReport::new(
        ensemble_id,
        EIGENVALUE,
        Interpretation::Fidelity.tag(),
        fid,
        exact,
        true,
    ));
    let weighted = pgm_eigenvalue_upper_bound(&weighted_gram(&pure, &priors)?, Interpretation::WeightedOverlap)?;
    out.push(BoundReport::new(
        ensemble_id,
        EIGENVALUE,
        Interpretation::WeightedOverlap.tag(),
        weighted,
        exact,
        true,
    ));
    for range in [IndexRange::Strict, IndexRange::Literal] {
        let value = pgm_lower_bound(&sim, &priors, range)?;
        out.push(BoundReport::new(
            ensemble_id,
            PAIRWISE_LOWER,
            range.tag(),
            value,
            exact,
            false,
        ));
    }
    Ok(out)
}

/// Audits a list of ensembles in parallel; ensemble `i` draws its swap-test
/// samples from substream `i` of `seed`.
pub fn audit_corpus(
    corpus: &[QuantumDataset],
    repetitions: Repetitions,
    seed: u64,
    execution: Execution,
) -> Result<Vec<BoundReport>> {
    let per_ensemble = execution.try_map(corpus.len(), |i| {
        let mut rng = RandomSource::substream(seed, i as u64);
        audit_bounds(i, &corpus[i], repetitions, &mut rng)
    })?;
    Ok(per_ensemble.into_iter().flatten().collect())
}

pub const AUDIT_CSV_HEADER: [&str; 6] = [
    "ensemble_id",
    "bound_name",
    "interpretation",
    "bound_value",
    "exact_error",
    "holds",
];

pub fn write_audit_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AUDIT_CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.ensemble_id.to_string(),
            r.bound_name.clone(),
            r.interpretation.clone(),
            format!("{:.12}", r.bound_value),
            format!("{:.12}", r.exact_error),
            r.holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fraction of reports matching `name` and `interpretation` that fail.
pub fn violation_rate(reports: &[BoundReport], name: &str, interpretation: &str) -> Option<f64> {
    let selected: Vec<&BoundReport> = reports
        .iter()
        .filter(|r| r.bound_name == name && r.interpretation == interpretation)
        .collect();
    if selected.is_empty() {
        return None;
    }
    Some(selected.iter().filter(|r| !r.holds).count() as f64 / selected.len() as f64)
}

fn equiprobable(states: Vec<PureState>) -> Result<QuantumDataset> {
    let labeled = states
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i as Label + 1))
        .collect();
    QuantumDataset::from_labeled(labeled, CopyMode::Classical)
}

/// Greedy rejection search for `n` states on `qubits` qubits whose pairwise
/// fidelities are all at most `max_fidelity`. A search that gets stuck
/// starts over.
pub fn low_fidelity_ensemble(
    qubits: u32,
    n: usize,
    max_fidelity: f64,
    rng: &mut RandomSource,
) -> Result<QuantumDataset> {
    const ATTEMPTS_PER_STATE: usize = 5_000;
    const RESTARTS: usize = 200;
    'restart: for _ in 0..RESTARTS {
        let mut states: Vec<PureState> = Vec::with_capacity(n);
        'grow: while states.len() < n {
            for _ in 0..ATTEMPTS_PER_STATE {
                let candidate = haar_random_state(qubits, rng)?;
                let mut compatible = true;
                for s in &states {
                    if fidelity(s, &candidate)? > max_fidelity {
                        compatible = false;
                        break;
                    }
                }
                if compatible {
                    states.push(candidate);
                    continue 'grow;
                }
            }
            continue 'restart;
        }
        return equiprobable(states);
    }
    Err(Error::DegenerateDataset(format!(
        "no {n} states with pairwise fidelity <= {max_fidelity} found"
    )))
}

/// Eight states on two qubits with all pairwise fidelities at most 1/4 whose
/// PGM error is still at least 1/2, because eight states cannot be told
/// apart in four dimensions.
pub fn low_fidelity_witness(rng: &mut RandomSource) -> Result<QuantumDataset> {
    low_fidelity_ensemble(2, 8, 0.25, rng)
}

/// Random equiprobable pure-state ensembles with 2 to 6 states on 1 to 3
/// qubits. Ensemble 0 is [`low_fidelity_witness`].
pub fn random_corpus(count: usize, seed: u64) -> Result<Vec<QuantumDataset>> {
    let mut rng = RandomSource::new(seed);
    let mut corpus = Vec::with_capacity(count);
    if count > 0 {
        corpus.push(low_fidelity_witness(&mut rng)?);
    }
    while corpus.len() < count {
        let n = 2 + rng.index(5);
        let qubits = 1 + rng.index(3) as u32;
        let states = (0..n)
            .map(|_| haar_random_state(qubits, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        corpus.push(equiprobable(states)?);
    }
    Ok(corpus)
}

/// Trine states: three real qubit states at 120 degrees.
pub fn trine() -> Vec<PureState> {
    (0..3)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            PureState::from_slice(&[C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]).expect("unit vector")
        })
        .collect()
}

/// Fidelity matrix as a real matrix, for callers that need raw access.
pub fn fidelity_matrix(states: &[&PureState]) -> Result<DMatrix<f64>> {
    Ok(SimilarityMatrix::exact(states)?.entries().clone())
}
