//! Monte Carlo classification trials.
//!
//! Each trial picks a training item, hands the classifier a fresh copy of its
//! state, and records the prediction. Trial `t` draws all of its randomness
//! from substream `t` of the run seed, so results do not depend on how trials
//! are scheduled across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ledger::CopyLedger;
use crate::numerics::RandomSource;
use crate::reductions::ClassifierBundle;
use crate::states::{Label, PureState, QuantumDataset};

/// How a trial chooses the state to classify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Class by prior, then a uniformly random state of that class.
    Demon,
    /// A state with probability proportional to its weight.
    Weighted,
}

/// Probability that a trial picks each item of `ds`, in item order.
pub fn item_probabilities(ds: &QuantumDataset, scenario: Scenario) -> Result<Vec<f64>> {
    let weights = ds.normalized_weights()?;
    Ok(match scenario {
        Scenario::Weighted => weights,
        Scenario::Demon => {
            let priors = ds.priors()?;
            ds.items()
                .iter()
                .map(|item| {
                    let prior = priors.iter().find(|(l, _)| *l == item.label).map_or(0.0, |p| p.1);
                    prior / ds.class_size(item.label) as f64
                })
                .collect()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Position of the classified state in the dataset.
    pub item: usize,
    pub true_label: Label,
    pub predicted: Label,
    /// Copies of the unknown state consumed by this trial.
    pub copies: u64,
}

impl TrialOutcome {
    pub fn is_error(&self) -> bool {
        self.true_label != self.predicted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    /// `sqrt(p (1 - p) / N)` at the empirical rate.
    pub standard_error: f64,
    pub max_copies: u64,
    pub mean_copies: f64,
}

pub fn summarize(outcomes: &[TrialOutcome]) -> TrialSummary {
    let n = outcomes.len() as u64;
    let errors = outcomes.iter().filter(|o| o.is_error()).count() as u64;
    let rate = if n == 0 { 0.0 } else { errors as f64 / n as f64 };
    TrialSummary {
        trials: n,
        errors,
        error_rate: rate,
        standard_error: if n == 0 {
            0.0
        } else {
            (rate * (1.0 - rate) / n as f64).sqrt()
        },
        max_copies: outcomes.iter().map(|o| o.copies).max().unwrap_or(0),
        mean_copies: if n == 0 {
            0.0
        } else {
            outcomes.iter().map(|o| o.copies).sum::<u64>() as f64 / n as f64
        },
    }
}

/// Runs `trials` independent classifications.
pub fn run_trials<C>(
    ds: &QuantumDataset,
    scenario: Scenario,
    trials: u64,
    seed: u64,
    execution: Execution,
    classify: C,
) -> Result<Vec<TrialOutcome>>
where
    C: Fn(&PureState, &mut RandomSource, &mut CopyLedger) -> Result<Label> + Sync + Send,
{
    if ds.is_empty() {
        return Err(Error::InvalidDataset("no states to classify".into()));
    }
    let probs = item_probabilities(ds, scenario)?;
    let n = usize::try_from(trials).map_err(|_| Error::InvalidConfig(format!("{trials} trials")))?;
    execution.try_map(n, |t| {
        let mut rng = RandomSource::substream(seed, t as u64);
        let item = rng.categorical(&probs);
        let mut ledger = CopyLedger::classical();
        let predicted = classify(&ds.items()[item].state, &mut rng, &mut ledger)?;
        Ok(TrialOutcome {
            trial: t as u64,
            item,
            true_label: ds.items()[item].label,
            predicted,
            copies: ledger.unknown_consumed(),
        })
    })
}

/// [`run_trials`] for a stored classifier.
pub fn run_bundle_trials(
    bundle: &ClassifierBundle,
    ds: &QuantumDataset,
    scenario: Scenario,
    trials: u64,
    seed: u64,
    execution: Execution,
) -> Result<Vec<TrialOutcome>> {
    run_trials(ds, scenario, trials, seed, execution, |state, rng, ledger| {
        bundle.classify(state, rng, ledger)
    })
}

/// Exact misclassification probability of one trial.
pub fn exact_trial_error(bundle: &ClassifierBundle, ds: &QuantumDataset, scenario: Scenario) -> Result<f64> {
    let probs = item_probabilities(ds, scenario)?;
    let mut err = 0.0;
    for (item, p) in ds.items().iter().zip(probs) {
        if p > 0.0 {
            err += p * (1.0 - bundle.probability_of(&item.state, item.label)?);
        }
    }
    Ok(err.clamp(0.0, 1.0))
}
