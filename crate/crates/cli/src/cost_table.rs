//! Measured training and classification costs of every pipeline.
//!
//! Each row trains on a fresh Haar dataset under a finite-copy ledger whose
//! budget is exactly the declared training cost, so an overrun fails loudly,
//! then classifies one unknown copy-counted state.

use qsclass_core::ledger::CopyMode;
use qsclass_core::measurement::measure;
use qsclass_core::reductions::{
    costing_classify, costing_train, one_vs_all_classify, one_vs_all_train, tree_classify, tree_train, ResampleMode,
    SplitRule,
};
use qsclass_core::states::haar_random_state;
use qsclass_core::swap_test::{classify_via_identification, similarity_matrix, Repetitions};
use qsclass_core::{
    BinaryLearner, CopyLedger, CostReport, Error, HelstromOracle, QuantumDataset, RandomSource, Result,
};
use serde::{Deserialize, Serialize};

use crate::config::{GeneratorSpec, WeightScheme};
use crate::generate::generate;
use crate::run::train;
use crate::{DatasetSource, ExperimentConfig, ReductionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostTableParams {
    pub seed: u64,
    pub t_bin: u64,
    /// Costing rounds `T`.
    pub rounds: u64,
    /// Swap-test repetitions `e`.
    pub repetitions: u64,
    /// Classes `k` for one-against-all and the tree.
    pub classes: usize,
    /// Training states `n` for identification and the similarity matrix.
    pub states: usize,
    pub qubits: u32,
}

impl Default for CostTableParams {
    fn default() -> Self {
        Self {
            seed: 0,
            t_bin: 1,
            rounds: 7,
            repetitions: 100,
            classes: 8,
            states: 8,
            qubits: 3,
        }
    }
}

/// Balanced-tree depth for `k` classes.
pub fn tree_depth(k: usize) -> u64 {
    (k.max(1) as u64).next_power_of_two().trailing_zeros() as u64
}

/// Costs predicted by the formulas, row by row in table order.
pub fn expected_costs(p: &CostTableParams) -> Vec<(&'static str, Option<u64>, Option<u64>)> {
    let k = p.classes as u64;
    let n = p.states as u64;
    vec![
        ("binary", Some(p.t_bin), Some(1)),
        ("weighted", Some(p.t_bin), Some(1)),
        ("costing", Some(p.rounds * p.t_bin), Some(p.rounds)),
        ("identification", Some(p.repetitions), Some(p.repetitions * n)),
        ("one_vs_all", Some(k * p.t_bin), Some(k)),
        (
            "tree",
            Some(p.t_bin * tree_depth(p.classes)),
            Some(tree_depth(p.classes)),
        ),
        ("pgm", None, Some(1)),
        ("pgm_bound", Some(p.repetitions * (n - 1)), None),
    ]
}

fn dataset(
    p: &CostTableParams,
    rng: &mut RandomSource,
    classes: usize,
    states: usize,
    weights: WeightScheme,
    copies: u64,
) -> Result<QuantumDataset> {
    generate(
        &GeneratorSpec::Haar {
            qubits: p.qubits,
            classes,
            states,
            weights,
            copies: CopyMode::Finite(copies),
        },
        rng,
    )
}

fn report(
    task: &str,
    training: &str,
    classification: &str,
    training_ledger: &CopyLedger,
    unknown_ledger: Option<&CopyLedger>,
) -> CostReport {
    CostReport {
        task: task.into(),
        training_symbolic: training.into(),
        training_measured: Some(training_ledger.max_training_consumed()),
        classification_symbolic: classification.into(),
        classification_measured: unknown_ledger.map(|l| l.unknown_consumed()),
    }
}

/// Builds every row of the table from real ledgers.
pub fn cost_table(p: &CostTableParams) -> Result<Vec<CostReport>> {
    if p.t_bin == 0 || p.rounds == 0 || p.repetitions == 0 {
        return Err(Error::InvalidConfig("t_bin, T and e must all be positive".into()));
    }
    if p.classes < 2 || p.states < 2 {
        return Err(Error::InvalidConfig(
            "the table needs k >= 2 classes and n >= 2 states".into(),
        ));
    }
    let oracle = HelstromOracle::v2(p.t_bin);
    let mut rng = RandomSource::new(p.seed);
    let mut rows = Vec::with_capacity(8);

    for (task, weights) in [("binary", WeightScheme::Uniform), ("weighted", WeightScheme::Random)] {
        let ds = dataset(p, &mut rng, 2, p.states, weights, p.t_bin)?;
        let mut ledger = CopyLedger::new(ds.declared_copies());
        let povm = oracle.learn(&ds, &mut ledger)?;
        let mut unknown = CopyLedger::classical();
        measure(&povm, &ds.items()[0].state, &mut rng, &mut unknown)?;
        rows.push(report(task, "t_bin", "1", &ledger, Some(&unknown)));
    }

    let training = p.rounds * p.t_bin;
    let ds = dataset(p, &mut rng, 2, p.states, WeightScheme::Uniform, training)?;
    let mut ledger = CopyLedger::new(ds.declared_copies());
    let agg = costing_train(
        &ds,
        p.rounds as usize,
        None,
        ResampleMode::Sampled,
        &oracle,
        &mut rng,
        &mut ledger,
    )?;
    let mut unknown = CopyLedger::classical().with_unknown_budget(p.rounds);
    costing_classify(&agg, &ds.items()[0].state, &mut rng, &mut unknown)?;
    rows.push(report("costing", "T*t_bin", "T", &ledger, Some(&unknown)));

    let ds = dataset(p, &mut rng, 2, p.states, WeightScheme::Uniform, p.repetitions)?;
    let mut ledger = CopyLedger::new(ds.declared_copies()).with_unknown_budget(p.repetitions * p.states as u64);
    let probe = haar_random_state(p.qubits, &mut rng)?;
    classify_via_identification(&probe, &ds, Repetitions::Shots(p.repetitions), 1, &mut rng, &mut ledger)?;
    rows.push(report("identification", "e", "e*n", &ledger, Some(&ledger)));

    let ds = dataset(
        p,
        &mut rng,
        p.classes,
        p.classes,
        WeightScheme::Uniform,
        p.classes as u64 * p.t_bin,
    )?;
    let mut ledger = CopyLedger::new(ds.declared_copies());
    let ova = one_vs_all_train(&ds, &oracle, &mut ledger)?;
    let mut unknown = CopyLedger::classical();
    one_vs_all_classify(&ova, &ds.items()[0].state, &mut rng, &mut unknown)?;
    rows.push(report("one_vs_all", "k*t_bin", "k", &ledger, Some(&unknown)));

    let depth = tree_depth(p.classes);
    let ds = dataset(
        p,
        &mut rng,
        p.classes,
        p.classes,
        WeightScheme::Uniform,
        depth * p.t_bin,
    )?;
    let mut ledger = CopyLedger::new(ds.declared_copies());
    let tree = tree_train(&ds, &oracle, SplitRule::RandomBalanced, &mut rng, &mut ledger)?;
    // leaves of an unbalanced k sit at two depths; the cost is the deeper one
    let mut deepest = CopyLedger::classical();
    for item in ds.items() {
        let mut unknown = CopyLedger::classical();
        tree_classify(&tree, &item.state, &mut rng, &mut unknown)?;
        if unknown.unknown_consumed() > deepest.unknown_consumed() {
            deepest = unknown;
        }
    }
    rows.push(report(
        "tree",
        "t_bin*ceil(log2 k)",
        "ceil(log2 k)",
        &ledger,
        Some(&deepest),
    ));

    let ds = generate(&GeneratorSpec::haar(p.qubits, p.classes, p.classes), &mut rng)?;
    let config = ExperimentConfig::new(
        p.seed,
        DatasetSource::Generated(GeneratorSpec::haar(p.qubits, p.classes, p.classes)),
        ReductionKind::Pgm,
    );
    let pgm = train(&config, &ds, &mut rng, &mut CopyLedger::classical())?;
    let mut unknown = CopyLedger::classical();
    pgm.classify(&ds.items()[0].state, &mut rng, &mut unknown)?;
    rows.push(CostReport {
        task: "pgm".into(),
        training_symbolic: "unknown".into(),
        training_measured: None,
        classification_symbolic: "1".into(),
        classification_measured: Some(unknown.unknown_consumed()),
    });

    let training = p.repetitions * (p.states as u64 - 1);
    let ds = dataset(p, &mut rng, 2, p.states, WeightScheme::Uniform, training)?;
    let mut ledger = CopyLedger::new(ds.declared_copies());
    similarity_matrix(&ds, Repetitions::Shots(p.repetitions), &mut rng, &mut ledger)?;
    rows.push(report("pgm_bound", "e*(n-1)", "not applicable", &ledger, None));
    Ok(rows)
}
