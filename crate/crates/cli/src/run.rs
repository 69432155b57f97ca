//! The `run` pipeline: train a classifier, then score it on Monte Carlo trials.

use std::fs;
use std::io::Write;
use std::path::Path;

use qsclass_core::exec::Execution;
use qsclass_core::measurement::pgm_labeled;
use qsclass_core::numerics::ComplexVector;
use qsclass_core::reductions::{costing_train, one_vs_all_train, tree_train, ClassifierBundle};
use qsclass_core::states::{class_mixture, haar_random_state, Label};
use qsclass_core::swap_test::{classify_via_identification, Repetitions};
use qsclass_core::trials::{exact_trial_error, run_trials, summarize, Scenario, TrialOutcome, TrialSummary};
use qsclass_core::{BinaryLearner, CopyLedger, CostReport, Error, PureState, QuantumDataset, RandomSource, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, ReductionKind};
use crate::generate::resolve;

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CLASSIFIER_FILE: &str = "classifier.json";

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub states: usize,
    pub classes: Vec<Label>,
    pub scenario: Scenario,
    pub trials: TrialSummary,
    /// Exact single-trial error of the trained classifier; absent for
    /// identification and perturbed runs.
    pub exact_error: Option<f64>,
    pub cost: CostReport,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcomes: Vec<TrialOutcome>,
    pub summary: RunSummary,
    pub bundle: Option<ClassifierBundle>,
}

fn symbolic_costs(kind: ReductionKind) -> (&'static str, &'static str) {
    match kind {
        ReductionKind::Binary | ReductionKind::WeightedHelstrom => ("t_bin", "1"),
        ReductionKind::Costing => ("T*t_bin", "T"),
        ReductionKind::Ova => ("k*t_bin", "k"),
        ReductionKind::Tree => ("t_bin*ceil(log2 k)", "ceil(log2 k)"),
        ReductionKind::Identify => ("e", "e*n"),
        ReductionKind::Pgm => ("unknown", "1"),
    }
}

fn require_binary(ds: &QuantumDataset, kind: ReductionKind) -> Result<()> {
    if ds.is_binary() {
        Ok(())
    } else {
        Err(Error::InvalidDataset(format!("{kind} needs labels [-1, 1]")))
    }
}

/// Trains the configured pipeline on `ds`.
pub fn train(
    config: &ExperimentConfig,
    ds: &QuantumDataset,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<ClassifierBundle> {
    let oracle = config.oracle();
    Ok(match config.reduction {
        ReductionKind::Binary => {
            require_binary(ds, config.reduction)?;
            ClassifierBundle::Binary {
                povm: oracle.learn(&ds.uniform(), ledger)?,
            }
        }
        ReductionKind::WeightedHelstrom => {
            require_binary(ds, config.reduction)?;
            ClassifierBundle::WeightedHelstrom {
                povm: oracle.learn(ds, ledger)?,
            }
        }
        ReductionKind::Costing => {
            let classifier = costing_train(ds, config.rounds, config.c, config.resample, &oracle, rng, ledger)?;
            ClassifierBundle::Costing {
                rounds: config.rounds,
                c: config
                    .c
                    .unwrap_or_else(|| ds.items().iter().map(|i| i.weight).fold(0.0, f64::max)),
                resample: config.resample,
                classifier,
            }
        }
        ReductionKind::Ova => ClassifierBundle::OneVsAll {
            classifier: one_vs_all_train(ds, &oracle, ledger)?,
        },
        ReductionKind::Tree => ClassifierBundle::Tree {
            split_rule: config.split,
            classifier: tree_train(ds, &oracle, config.split, rng, ledger)?,
        },
        ReductionKind::Pgm => {
            let labels = ds.label_set().to_vec();
            let (states, priors): (Vec<_>, Vec<_>) = labels
                .iter()
                .map(|&l| class_mixture(ds, l))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            ClassifierBundle::Pgm {
                povm: pgm_labeled(&states, &priors, &labels)?,
            }
        }
        ReductionKind::Identify => return Err(Error::InvalidConfig("identification has no trained classifier".into())),
    })
}

/// A state at Euclidean distance `eps` from `state`, rotated towards a
/// random orthogonal direction.
pub fn perturb(state: &PureState, eps: f64, rng: &mut RandomSource) -> Result<PureState> {
    let v = state.amplitudes();
    let direction = loop {
        let r = haar_random_state(state.qubits(), rng)?;
        let w: ComplexVector = r.amplitudes() - v * v.dotc(r.amplitudes());
        if w.norm() > 1e-8 {
            break w.unscale(w.norm());
        }
    };
    let cos = 1.0 - eps * eps / 2.0;
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    PureState::normalized(v.scale(cos) + direction.scale(sin))
}

/// Trains (except for identification) and runs the configured trials under
/// the demon scenario. Training uses substream 1 of the seed and the trials
/// substreams of a seed forked from substream 2.
pub fn execute(config: &ExperimentConfig) -> Result<RunResult> {
    execute_with(config, Execution::default())
}

pub fn execute_with(config: &ExperimentConfig, execution: Execution) -> Result<RunResult> {
    config.validate()?;
    let ds = resolve(&config.dataset, config.seed)?;
    let mut train_rng = RandomSource::substream(config.seed, 1);
    let trial_seed = RandomSource::substream(config.seed, 2).fork_seed();
    let mut ledger = CopyLedger::new(ds.declared_copies());
    let scenario = Scenario::Demon;
    let eps = config.perturbation;

    let prepare = |state: &PureState, rng: &mut RandomSource| -> Result<PureState> {
        match eps {
            Some(eps) => perturb(state, eps, rng),
            None => Ok(state.clone()),
        }
    };

    let (bundle, outcomes, training_measured) = if config.reduction == ReductionKind::Identify {
        let repetitions = config.repetitions.map_or(Repetitions::Exact, Repetitions::Shots);
        if let Repetitions::Shots(e) = repetitions {
            ledger.consume_training_all(ds.ids(), e.saturating_mul(config.trials))?;
        }
        let outcomes = run_trials(
            &ds,
            scenario,
            config.trials,
            trial_seed,
            execution,
            |state, rng, trial_ledger| {
                let unknown = prepare(state, rng)?;
                classify_via_identification(&unknown, &ds, repetitions, config.neighbours, rng, trial_ledger)
            },
        )?;
        (None, outcomes, ledger.max_training_consumed() / config.trials)
    } else {
        let bundle = train(config, &ds, &mut train_rng, &mut ledger)?;
        let outcomes = run_trials(
            &ds,
            scenario,
            config.trials,
            trial_seed,
            execution,
            |state, rng, trial_ledger| {
                let unknown = prepare(state, rng)?;
                bundle.classify(&unknown, rng, trial_ledger)
            },
        )?;
        (Some(bundle), outcomes, ledger.max_training_consumed())
    };

    let trials = summarize(&outcomes);
    let exact_error = match (&bundle, eps) {
        (Some(b), None) => Some(exact_trial_error(b, &ds, scenario)?),
        _ => None,
    };
    let (training_symbolic, classification_symbolic) = symbolic_costs(config.reduction);
    let cost = CostReport {
        task: config.reduction.name().to_string(),
        training_symbolic: training_symbolic.into(),
        training_measured: (config.reduction != ReductionKind::Pgm).then_some(training_measured),
        classification_symbolic: classification_symbolic.into(),
        classification_measured: Some(trials.max_copies),
    };
    let summary = RunSummary {
        config: config.clone(),
        states: ds.len(),
        classes: ds.label_set().to_vec(),
        scenario,
        trials,
        exact_error,
        cost,
    };
    Ok(RunResult {
        outcomes,
        summary,
        bundle,
    })
}

pub fn write_trials_csv<W: Write>(outcomes: &[TrialOutcome], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "item", "true_label", "predicted", "copies"])?;
    for o in outcomes {
        w.write_record([
            o.trial.to_string(),
            o.item.to_string(),
            o.true_label.to_string(),
            o.predicted.to_string(),
            o.copies.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the trial CSV, the summary JSON and, when there is one, the classifier.
pub fn write_outputs(result: &RunResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trials_csv(&result.outcomes, fs::File::create(dir.join(TRIALS_FILE))?)?;
    fs::write(
        dir.join(SUMMARY_FILE),
        serde_json::to_string_pretty(&result.summary)? + "\n",
    )?;
    if let Some(bundle) = &result.bundle {
        fs::write(dir.join(CLASSIFIER_FILE), bundle.to_json()? + "\n")?;
    }
    Ok(())
}

pub fn summary_line(s: &RunSummary) -> String {
    let exact = s.exact_error.map_or_else(|| "n/a".to_string(), |e| format!("{e:.6}"));
    let training = s
        .cost
        .training_measured
        .map_or_else(|| "n/a".to_string(), |c| c.to_string());
    format!(
        "{}: {} trials, error {:.6} +/- {:.6} (exact {exact}), training copies/state {training}, classification copies {}",
        s.config.reduction, s.trials.trials, s.trials.error_rate, s.trials.standard_error, s.cost.classification_measured.unwrap_or(0)
    )
}
