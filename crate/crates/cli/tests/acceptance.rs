//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always printed. Criteria listed
//! in `KNOWN_UNATTAINABLE` still print their real verdict; every other
//! failure makes the process exit non-zero.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use qsclass_cli::cost_table::{cost_table, expected_costs, CostTableParams};
use qsclass_cli::run::{execute, CLASSIFIER_FILE, SUMMARY_FILE, TRIALS_FILE};
use qsclass_cli::{DatasetSource, ExperimentConfig, OracleChoice, ReductionKind};
use qsclass_core::bounds::{audit_corpus, names, pgm_exact_error, random_corpus, trine, violation_rate, BoundReport};
use qsclass_core::exec::Execution;
use qsclass_core::ledger::error_rate;
use qsclass_core::measurement::{helstrom_binary, helstrom_weighted, pgm_labeled};
use qsclass_core::numerics::{expectation, identity, max_abs_diff, ComplexMatrix, ComplexVector};
use qsclass_core::reductions::{
    costing_train, one_vs_all_node_errors, one_vs_all_train, tree_node_errors, tree_node_masses, tree_train,
    ClassifierBundle, ResampleMode, SplitRule,
};
use qsclass_core::states::{class_mixture, fidelity, haar_random_state, Label, NEGATIVE, POSITIVE};
use qsclass_core::swap_test::{cswap_estimate, Repetitions};
use qsclass_core::trials::{exact_trial_error, run_bundle_trials, summarize, Scenario};
use qsclass_core::{
    CopyLedger, CopyMode, DensityMatrix, HelstromOracle, Holder, PureState, QuantumDataset, RandomSource,
};
use tempfile::TempDir;

/// Criteria that cannot hold as stated; see the README for the analysis.
const KNOWN_UNATTAINABLE: [u32; 2] = [5, 8];

const TOL: f64 = 1e-9;
const RANDOM_POVMS: usize = 1000;

struct Verdict {
    id: u32,
    pass: bool,
    detail: String,
}

fn verdict(id: u32, pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        id,
        pass,
        detail: detail.into(),
    }
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.component_mul(&b.transpose()).sum().re
}

/// Trace norm from nalgebra's own Hermitian eigensolver, independent of the
/// library's Jacobi routine.
fn reference_trace_norm(a: &ComplexMatrix) -> f64 {
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Effect `E = sum_k c_k |u_k><u_k|` on random orthonormal `u_k` of random
/// rank; `c_k` is 1 half the time and uniform on [0, 1] otherwise.
fn random_effect(dim: usize, rng: &mut RandomSource) -> ComplexMatrix {
    let rank = rng.index(dim + 1);
    let projective = rng.bernoulli(0.5);
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v = ComplexVector::from_fn(dim, |_, _| rng.complex_normal());
        for u in &basis {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v.unscale(norm));
        }
    }
    let mut e = ComplexMatrix::zeros(dim, dim);
    for u in &basis {
        let c = if projective { 1.0 } else { rng.uniform() };
        e += (u * u.adjoint()).scale(c);
    }
    e
}

/// Binary dataset with `2..=8` states on up to `max_qubits` qubits, both
/// classes present and weights uniform on `[0.05, 1.05)`.
fn random_binary_dataset(max_qubits: u32, rng: &mut RandomSource) -> QuantumDataset {
    let qubits = 1 + rng.index(max_qubits as usize) as u32;
    let n = 2 + rng.index(7);
    let items = (0..n)
        .map(|i| {
            let label = match i {
                0 => NEGATIVE,
                1 => POSITIVE,
                _ if rng.bernoulli(0.5) => NEGATIVE,
                _ => POSITIVE,
            };
            (haar_random_state(qubits, rng).unwrap(), label, 0.05 + rng.uniform())
        })
        .collect();
    QuantumDataset::from_weighted(items, CopyMode::Classical).unwrap()
}

fn gamma(ds: &QuantumDataset) -> (ComplexMatrix, f64) {
    let (rho_minus, p_minus) = class_mixture(ds, NEGATIVE).unwrap();
    let (rho_plus, p_plus) = class_mixture(ds, POSITIVE).unwrap();
    (
        rho_minus.matrix().scale(p_minus) - rho_plus.matrix().scale(p_plus),
        p_minus,
    )
}

/// Error of `{E_- = e, E_+ = I - e}` on the weighted dataset: `p_- - Tr(E_- Gamma)`.
fn binary_error(e: &ComplexMatrix, g: &ComplexMatrix, p_minus: f64) -> f64 {
    p_minus - trace_product(e, g)
}

fn minus_element(povm: &qsclass_core::Povm) -> ComplexMatrix {
    povm.element_for(NEGATIVE).expect("binary POVM").clone()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let results = Execution::default().map(500, |i| {
        let mut rng = RandomSource::substream(101, i as u64);
        let ds = random_binary_dataset(4, &mut rng);
        let (rho_minus, p_minus) = class_mixture(&ds, NEGATIVE).unwrap();
        let (rho_plus, p_plus) = class_mixture(&ds, POSITIVE).unwrap();
        let povm = helstrom_binary(&rho_minus, &rho_plus, p_minus, p_plus).unwrap();
        let (g, pm) = gamma(&ds);
        let optimum = 0.5 - reference_trace_norm(&g) / 2.0;
        let achieved = binary_error(&minus_element(&povm), &g, pm);
        let gap = (achieved - optimum).abs();
        let beaten = (0..RANDOM_POVMS)
            .filter(|_| binary_error(&random_effect(ds.dim(), &mut rng), &g, pm) < achieved - TOL)
            .count();
        (gap, beaten)
    });
    let elapsed = start.elapsed();
    let max_gap = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let beaten: usize = results.iter().map(|r| r.1).sum();
    verdict(
        1,
        max_gap <= TOL && beaten == 0 && elapsed <= Duration::from_secs(120),
        format!(
            "500 ensembles x {RANDOM_POVMS} POVMs: max |error - (1/2 - D/2)| = {max_gap:.2e}, random POVMs beating Helstrom = {beaten}, {:.1}s (limit 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn weighted_error(ds: &QuantumDataset, e_minus: &ComplexMatrix) -> f64 {
    let w = ds.normalized_weights().unwrap();
    let e_plus = identity(ds.dim()) - e_minus;
    ds.items()
        .iter()
        .zip(w)
        .map(|(item, w)| {
            let e = if item.label == NEGATIVE { e_minus } else { &e_plus };
            w * (1.0 - expectation(e, item.state.amplitudes()))
        })
        .sum()
}

fn criterion_2() -> Verdict {
    let results = Execution::default().map(200, |i| {
        let mut rng = RandomSource::substream(202, i as u64);
        let ds = random_binary_dataset(3, &mut rng);
        let achieved = weighted_error(&ds, &minus_element(&helstrom_weighted(&ds).unwrap()));
        let beaten = (0..RANDOM_POVMS)
            .filter(|_| weighted_error(&ds, &random_effect(ds.dim(), &mut rng)) < achieved - TOL)
            .count();
        let uniform = ds.uniform();
        let weighted = helstrom_weighted(&uniform).unwrap();
        let (rho_minus, p_minus) = class_mixture(&uniform, NEGATIVE).unwrap();
        let (rho_plus, p_plus) = class_mixture(&uniform, POSITIVE).unwrap();
        let plain = helstrom_binary(&rho_minus, &rho_plus, p_minus, p_plus).unwrap();
        let element_gap = weighted
            .elements()
            .iter()
            .zip(plain.elements())
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(0.0, f64::max);
        let error_gap = (weighted_error(&uniform, &minus_element(&weighted))
            - weighted_error(&uniform, &minus_element(&plain)))
        .abs();
        (beaten, element_gap.max(error_gap))
    });
    let beaten: usize = results.iter().map(|r| r.0).sum();
    let gap = results.iter().map(|r| r.1).fold(0.0, f64::max);
    verdict(
        2,
        beaten == 0 && gap <= 1e-12,
        format!("200 weighted ensembles x {RANDOM_POVMS} POVMs: random POVMs beating the weighted construction = {beaten}; uniform-weight gap to the unweighted construction = {gap:.1e}"),
    )
}

fn criterion_3() -> Verdict {
    let exact = 0.146_446_61;
    let zero = PureState::basis(2, 0).to_density();
    let plus = PureState::plus().to_density();
    let helstrom = helstrom_binary(&zero, &plus, 0.5, 0.5).unwrap();
    let helstrom_err = 0.5
        * (1.0
            - expectation(
                &minus_element(&helstrom),
                &ComplexVector::from_vec(vec![1.0.into(), 0.0.into()]),
            ))
        + 0.5 * (1.0 - helstrom.probability_of(&PureState::plus(), POSITIVE).unwrap());
    let pgm_err = pgm_exact_error(&[zero, plus], &[0.5, 0.5]).unwrap();
    let trine_states: Vec<DensityMatrix> = trine().iter().map(|s| s.to_density()).collect();
    let trine_err = pgm_exact_error(&trine_states, &[1.0 / 3.0; 3]).unwrap();
    let mut orthogonal_max: f64 = 0.0;
    for k in [2usize, 3, 4, 8] {
        let dim = k.next_power_of_two();
        let states: Vec<DensityMatrix> = (0..k).map(|i| PureState::basis(dim, i).to_density()).collect();
        orthogonal_max = orthogonal_max.max(pgm_exact_error(&states, &vec![1.0 / k as f64; k]).unwrap());
        let ds = QuantumDataset::from_labeled(
            (0..k).map(|i| (PureState::basis(dim, i), i as Label + 1)).collect(),
            CopyMode::Classical,
        )
        .unwrap();
        let tree = tree_train(
            &ds,
            &HelstromOracle::v1(),
            SplitRule::RandomBalanced,
            &mut RandomSource::new(3),
            &mut CopyLedger::classical(),
        )
        .unwrap();
        let bundle = ClassifierBundle::Tree {
            split_rule: SplitRule::RandomBalanced,
            classifier: tree,
        };
        orthogonal_max = orthogonal_max.max(bundle.exact_error(&ds).unwrap());
        let binary = ds
            .relabel(
                vec![NEGATIVE, POSITIVE],
                |i| if i.label == 1 { NEGATIVE } else { POSITIVE },
            )
            .unwrap();
        orthogonal_max = orthogonal_max.max(error_rate(&helstrom_weighted(&binary).unwrap(), &binary).unwrap());
    }
    let pass = (helstrom_err - exact).abs() <= 1e-8
        && (pgm_err - exact).abs() <= 1e-8
        && (trine_err - 1.0 / 3.0).abs() <= 1e-8
        && orthogonal_max <= 1e-8;
    verdict(
        3,
        pass,
        format!("{{|0>,|+>}}: Helstrom {helstrom_err:.10}, PGM {pgm_err:.10}; trine PGM {trine_err:.10}; orthogonal ensembles max error {orthogonal_max:.1e}"),
    )
}

fn rows<'a>(reports: &'a [BoundReport], name: &str, tag: Option<&str>) -> Vec<&'a BoundReport> {
    reports
        .iter()
        .filter(|r| r.bound_name == name && tag.is_none_or(|t| r.interpretation == t))
        .collect()
}

fn criterion_4(corpus_reports: &[BoundReport]) -> (Verdict, String) {
    let lower = rows(corpus_reports, names::HELSTROM_OPTIMALITY, None);
    let upper = rows(corpus_reports, names::SQUARE_ROOT_SANDWICH, None);
    let guess = rows(corpus_reports, names::PRIOR_GUESS, None);
    let corpus_ok = lower.iter().chain(&upper).chain(&guess).all(|r| r.holds);
    // two-class mixed-state problems: the same sandwich between class mixtures
    let mixed = Execution::default().map(200, |i| {
        let mut rng = RandomSource::substream(404, i as u64);
        let ds = random_binary_dataset(3, &mut rng);
        let (rho_minus, p_minus) = class_mixture(&ds, NEGATIVE).unwrap();
        let (rho_plus, p_plus) = class_mixture(&ds, POSITIVE).unwrap();
        let (g, pm) = gamma(&ds);
        let opt = 0.5 - reference_trace_norm(&g) / 2.0;
        let pgm = pgm_labeled(&[rho_minus, rho_plus], &[p_minus, p_plus], &[NEGATIVE, POSITIVE]).unwrap();
        let e = binary_error(&minus_element(&pgm), &g, pm);
        (
            opt <= e + TOL && e <= opt.max(0.0).sqrt() + TOL,
            e > 1.0 - p_minus.max(p_plus) + TOL,
        )
    });
    let mixed_ok = mixed.iter().filter(|r| r.0).count();
    let worse_than_guessing = mixed.iter().filter(|r| r.1).count();
    let v = verdict(
        4,
        corpus_ok && mixed_ok == mixed.len() && !lower.is_empty(),
        format!(
            "corpus: {} two-state sandwiches, {} prior-guess rows, all hold = {corpus_ok}; two-class mixtures: {mixed_ok}/{} sandwiches hold",
            upper.len(),
            guess.len(),
            mixed.len()
        ),
    );
    let info = format!(
        "with unequal class priors the PGM is worse than guessing on {worse_than_guessing}/{} two-class mixtures (not claimed there)",
        mixed.len()
    );
    (v, info)
}

fn criterion_5() -> Verdict {
    const N: u64 = 10_000;
    let results = (0..50u64)
        .map(|i| {
            let mut rng = RandomSource::substream(505, i);
            let n = [4usize, 6, 8][rng.index(3)];
            let items = (0..n)
                .map(|j| {
                    let label = if j % 2 == 0 { NEGATIVE } else { POSITIVE };
                    (
                        haar_random_state(1, &mut rng).unwrap(),
                        label,
                        0.1 + 0.9 * rng.uniform(),
                    )
                })
                .collect();
            let ds = QuantumDataset::from_weighted(items, CopyMode::Classical).unwrap();
            let target = error_rate(&helstrom_weighted(&ds).unwrap(), &ds).unwrap();
            let agg = costing_train(
                &ds,
                31,
                None,
                ResampleMode::Sampled,
                &HelstromOracle::v1(),
                &mut rng,
                &mut CopyLedger::classical(),
            )
            .unwrap();
            let bundle = ClassifierBundle::Costing {
                rounds: 31,
                c: ds.items().iter().map(|it| it.weight).fold(0.0, f64::max),
                resample: ResampleMode::Sampled,
                classifier: agg,
            };
            let outcomes = run_bundle_trials(
                &bundle,
                &ds,
                Scenario::Weighted,
                N,
                rng.fork_seed(),
                Execution::default(),
            )
            .unwrap();
            let empirical = summarize(&outcomes).error_rate;
            let own_exact = exact_trial_error(&bundle, &ds, Scenario::Weighted).unwrap();
            let se = |p: f64| (p * (1.0 - p) / N as f64).sqrt();
            (
                (empirical - target).abs() <= 3.0 * se(target),
                (empirical - own_exact).abs() <= 3.0 * se(own_exact).max(1.0 / N as f64),
                empirical - target,
            )
        })
        .collect::<Vec<_>>();
    let within = results.iter().filter(|r| r.0).count();
    let self_consistent = results.iter().filter(|r| r.1).count();
    let below = results.iter().filter(|r| r.2 < 0.0 && !r.0).count();
    let above = results.iter().filter(|r| r.2 > 0.0 && !r.0).count();
    verdict(
        5,
        within == results.len(),
        format!(
            "T=31 sampled costing on 50 weighted qubit datasets, N={N}: {within}/50 within 3 SE of the weighted Helstrom error ({below} below, {above} above); {self_consistent}/50 agree with the aggregate's own exact error"
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut mismatches = Vec::new();
    let sets = [
        CostTableParams::default(),
        CostTableParams {
            seed: 6,
            t_bin: 3,
            rounds: 31,
            repetitions: 10,
            classes: 5,
            states: 6,
            qubits: 2,
        },
        CostTableParams {
            seed: 7,
            t_bin: 2,
            rounds: 1,
            repetitions: 1,
            classes: 2,
            states: 2,
            qubits: 1,
        },
    ];
    let mut checked = 0;
    for p in &sets {
        let table = cost_table(p).unwrap();
        for (row, (task, training, classification)) in table.iter().zip(expected_costs(p)) {
            checked += 1;
            if row.task != task || row.training_measured != training || row.classification_measured != classification {
                mismatches.push(format!(
                    "{task}: {:?}/{:?}",
                    row.training_measured, row.classification_measured
                ));
            }
        }
    }
    // the same formulas through `run` on finite-copy datasets
    let runs: [(&str, ReductionKind, u64, u64); 4] = [
        ("haar:qubits=2,states=6,copies=14", ReductionKind::Costing, 14, 7),
        ("haar:qubits=2,classes=4,states=8,copies=8", ReductionKind::Ova, 8, 4),
        ("haar:qubits=3,classes=8,states=8,copies=6", ReductionKind::Tree, 6, 3),
        ("haar:qubits=2,states=5,copies=400", ReductionKind::Identify, 20, 100),
    ];
    for (dataset, kind, training, classification) in runs {
        let mut config = ExperimentConfig::new(61, dataset.parse::<DatasetSource>().unwrap(), kind);
        config.oracle = OracleChoice::V2;
        config.t_bin = 2;
        config.rounds = 7;
        config.repetitions = Some(20);
        config.trials = 20;
        let summary = execute(&config).unwrap().summary;
        checked += 1;
        if summary.cost.training_measured != Some(training)
            || summary.cost.classification_measured != Some(classification)
        {
            mismatches.push(format!(
                "run {kind}: {:?}/{:?}",
                summary.cost.training_measured, summary.cost.classification_measured
            ));
        }
    }
    verdict(
        6,
        mismatches.is_empty(),
        format!("{checked} measured cost pairs against the formulas, mismatches: {mismatches:?}"),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = RandomSource::new(707);
    let mut ledger = CopyLedger::classical();
    let e = 10_000;
    let mut unbiased = 0;
    for _ in 0..50 {
        let a = haar_random_state(2, &mut rng).unwrap();
        let b = haar_random_state(2, &mut rng).unwrap();
        let f = fidelity(&a, &b).unwrap();
        let est = cswap_estimate(
            (&a, Holder::Unknown),
            (&b, Holder::Training(0)),
            e,
            &mut rng,
            &mut ledger,
        )
        .unwrap();
        let q = (1.0 - f) / 2.0;
        let sigma = 2.0 * (q * (1.0 - q) / e as f64).sqrt();
        unbiased += usize::from((est - f).abs() <= 3.0 * sigma.max(1e-12));
    }
    let pairs: Vec<(PureState, PureState)> = (0..20)
        .map(|_| {
            (
                haar_random_state(1, &mut rng).unwrap(),
                haar_random_state(1, &mut rng).unwrap(),
            )
        })
        .collect();
    let points: Vec<(f64, f64)> = [100u64, 1_000, 10_000]
        .iter()
        .map(|&e| {
            let mut sq = 0.0;
            for (a, b) in &pairs {
                let f = fidelity(a, b).unwrap();
                for _ in 0..200 {
                    let est = cswap_estimate((a, Holder::Unknown), (b, Holder::Training(0)), e, &mut rng, &mut ledger)
                        .unwrap();
                    sq += (est - f).powi(2);
                }
            }
            ((e as f64).ln(), (sq / (pairs.len() * 200) as f64).sqrt().ln())
        })
        .collect();
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    verdict(
        7,
        unbiased == 50 && (slope + 0.5).abs() <= 0.1,
        format!(
            "{unbiased}/50 estimates within 3 sigma at e=10^4; log-log RMSE slope {slope:.3} (target -0.5 +/- 0.1)"
        ),
    )
}

struct AuditCounts {
    ensembles: usize,
    ova_violations: usize,
    tree_violations: usize,
    tree_union_violations: usize,
}

fn criterion_8() -> (Verdict, String) {
    const N: u64 = 2_000;
    let mut counts = AuditCounts {
        ensembles: 0,
        ova_violations: 0,
        tree_violations: 0,
        tree_union_violations: 0,
    };
    let mut per_k = Vec::new();
    for (slot, k) in [3usize, 4, 8].into_iter().enumerate() {
        let depth = (k as f64).log2().ceil();
        let qubits = if k == 8 { 3 } else { 2 };
        let results = Execution::default().map(100, |i| {
            let mut rng = RandomSource::substream(808 + slot as u64, i as u64);
            let ds = QuantumDataset::from_labeled(
                (0..2 * k)
                    .map(|j| (haar_random_state(qubits, &mut rng).unwrap(), (j % k) as Label + 1))
                    .collect(),
                CopyMode::Classical,
            )
            .unwrap();
            let mut ledger = CopyLedger::classical();
            let ova = ClassifierBundle::OneVsAll {
                classifier: one_vs_all_train(&ds, &HelstromOracle::v1(), &mut ledger).unwrap(),
            };
            let tree_cls = tree_train(
                &ds,
                &HelstromOracle::v1(),
                SplitRule::RandomBalanced,
                &mut rng,
                &mut ledger,
            )
            .unwrap();
            let node_errors = tree_node_errors(&tree_cls, &ds).unwrap();
            let masses = tree_node_masses(&tree_cls, &ds).unwrap();
            let ova_nodes = match &ova {
                ClassifierBundle::OneVsAll { classifier } => one_vs_all_node_errors(classifier, &ds).unwrap(),
                _ => unreachable!(),
            };
            let tree = ClassifierBundle::Tree {
                split_rule: SplitRule::RandomBalanced,
                classifier: tree_cls,
            };
            let measured = |b: &ClassifierBundle, seed: u64| {
                let s = summarize(&run_bundle_trials(b, &ds, Scenario::Demon, N, seed, Execution::Sequential).unwrap());
                (s.error_rate, s.standard_error)
            };
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let (ova_err, ova_se) = measured(&ova, rng.fork_seed());
            let (tree_err, tree_se) = measured(&tree, rng.fork_seed());
            let union: f64 = masses.iter().zip(&node_errors).map(|(m, e)| m * e).sum();
            (
                ova_err > (k as f64 - 1.0) * mean(&ova_nodes) + 3.0 * ova_se,
                tree_err > depth * mean(&node_errors) + 3.0 * tree_se,
                tree_err > union + 3.0 * tree_se,
            )
        });
        let ova_v = results.iter().filter(|r| r.0).count();
        let tree_v = results.iter().filter(|r| r.1).count();
        let union_v = results.iter().filter(|r| r.2).count();
        per_k.push(format!("k={k}: one-vs-all {ova_v}, tree {tree_v}"));
        counts.ensembles += results.len();
        counts.ova_violations += ova_v;
        counts.tree_violations += tree_v;
        counts.tree_union_violations += union_v;
    }
    let detail = format!(
        "{} ensembles, violations of (k-1)*mean and ceil(log2 k)*mean (+3 SE): {}",
        counts.ensembles,
        per_k.join("; ")
    );
    let info = format!(
        "tree error <= sum over nodes of visit probability * node error (+3 SE): {} violations in {} ensembles; one-vs-all half alone: {}",
        counts.tree_union_violations,
        counts.ensembles,
        if counts.ova_violations == 0 { "PASS" } else { "FAIL" }
    );
    (
        verdict(8, counts.ova_violations == 0 && counts.tree_violations == 0, detail),
        info,
    )
}

fn criterion_9(
    corpus_reports: &[BoundReport],
    csv_reports: usize,
    csv_rows: usize,
    csv_fidelity_rate: Option<f64>,
) -> Verdict {
    let strict = rows(corpus_reports, names::PAIRWISE_LOWER, Some("strict"));
    let row_sum = rows(corpus_reports, names::FIDELITY_ROW_SUM, Some("row_sum"));
    let ok = strict.iter().chain(&row_sum).all(|r| r.holds) && strict.len() == 200 && row_sum.len() == 200;
    let fidelity_rate = violation_rate(corpus_reports, names::EIGENVALUE, "fidelity").unwrap_or(f64::NAN);
    let weighted_rate = violation_rate(corpus_reports, names::EIGENVALUE, "weighted_overlap").unwrap_or(f64::NAN);
    let literal_rate = violation_rate(corpus_reports, names::PAIRWISE_LOWER, "literal").unwrap_or(f64::NAN);
    verdict(
        9,
        ok && csv_rows == csv_reports && csv_fidelity_rate == Some(fidelity_rate),
        format!(
            "200 ensembles: strict lower bound {}/200, row-sum bound {}/200 hold; reported violation rates: eigenvalue fidelity {fidelity_rate:.3}, eigenvalue weighted_overlap {weighted_rate:.3}, literal lower bound {literal_rate:.3}; CLI CSV rows {csv_rows}",
            strict.iter().filter(|r| r.holds).count(),
            row_sum.iter().filter(|r| r.holds).count(),
        ),
    )
}

fn qsclass(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qsclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the CLI audit on the corpus and reads back its row count and
/// fidelity-tag eigenvalue violation rate.
fn cli_audit(dir: &TempDir) -> (usize, Option<f64>) {
    let p = dir.path().join("audit.csv");
    let out = qsclass(&[
        "audit",
        "--seed",
        "909",
        "--ensembles",
        "200",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&p).unwrap();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let fid: Vec<&csv::StringRecord> = records
        .iter()
        .filter(|r| &r[1] == "eigenvalue" && &r[2] == "fidelity")
        .collect();
    let rate = (!fid.is_empty()).then(|| fid.iter().filter(|r| &r[5] == "false").count() as f64 / fid.len() as f64);
    (records.len(), rate)
}

fn criterion_10(dir: &TempDir, suite_start: Instant) -> Verdict {
    let mut differing = Vec::new();
    for reduction in ReductionKind::ALL {
        let dataset = match reduction {
            ReductionKind::Binary | ReductionKind::WeightedHelstrom | ReductionKind::Costing => {
                "haar:qubits=2,states=6,weights=random"
            }
            _ => "haar:qubits=2,classes=4,states=8",
        };
        let outs: Vec<_> = ["a", "b"]
            .iter()
            .map(|tag| {
                let out = dir.path().join(format!("{reduction}-{tag}"));
                let result = qsclass(&[
                    "run",
                    "--seed",
                    "1010",
                    "--dataset",
                    dataset,
                    "--reduction",
                    reduction.name(),
                    "--e",
                    "30",
                    "--trials",
                    "5000",
                    "--out",
                    out.to_str().unwrap(),
                ]);
                assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
                (result.stdout, out)
            })
            .collect();
        let same_files = [TRIALS_FILE, SUMMARY_FILE, CLASSIFIER_FILE]
            .iter()
            .all(|f| fs::read(outs[0].1.join(f)).ok() == fs::read(outs[1].1.join(f)).ok());
        if outs[0].0 != outs[1].0 || !same_files {
            differing.push(reduction.name());
        }
    }
    let elapsed = suite_start.elapsed();
    verdict(
        10,
        differing.is_empty() && elapsed <= Duration::from_secs(600),
        format!(
            "repeated runs of all {} reductions byte-identical: {}; suite time {:.1}s (limit 600s)",
            ReductionKind::ALL.len(),
            if differing.is_empty() {
                "yes".to_string()
            } else {
                format!("no, {differing:?}")
            },
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let dir = TempDir::new().unwrap();
    let corpus = random_corpus(200, 909).unwrap();
    let corpus_reports = audit_corpus(&corpus, Repetitions::Exact, 909, Execution::default()).unwrap();
    let (csv_rows, csv_rate) = cli_audit(&dir);

    let mut verdicts = Vec::new();
    let mut report = |v: Verdict, extra: Option<String>| {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {}", v.id, v.detail);
        if let Some(extra) = extra {
            println!("criterion {:>2} info: {extra}", v.id);
        }
        verdicts.push((v.id, v.pass));
    };
    report(criterion_1(), None);
    report(criterion_2(), None);
    report(criterion_3(), None);
    let (v4, info4) = criterion_4(&corpus_reports);
    report(v4, Some(info4));
    report(criterion_5(), None);
    report(criterion_6(), None);
    report(criterion_7(), None);
    let (v8, info8) = criterion_8();
    report(v8, Some(info8));
    report(
        criterion_9(&corpus_reports, corpus_reports.len(), csv_rows, csv_rate),
        None,
    );
    report(criterion_10(&dir, start), None);

    let unexpected: Vec<u32> = verdicts
        .iter()
        .filter(|(id, pass)| !pass && !KNOWN_UNATTAINABLE.contains(id))
        .map(|(id, _)| *id)
        .collect();
    let passed = verdicts.iter().filter(|v| v.1).count();
    println!(
        "acceptance: {passed}/{} criteria pass; known unattainable: {KNOWN_UNATTAINABLE:?}",
        verdicts.len()
    );
    if !unexpected.is_empty() {
        println!("acceptance: unexpected failures {unexpected:?}");
        std::process::exit(1);
    }
}
