use qsclass_core::ledger::{CopyMode, Holder};
use qsclass_core::states::{fidelity, haar_random_state, Label};
use qsclass_core::swap_test::{
    classify_via_identification, cswap_estimate, similarity_matrix, Repetitions, SimilarityMatrix,
};
use qsclass_core::{CopyLedger, PureState, QuantumDataset, RandomSource};

#[test]
fn estimator_is_unbiased_on_random_pairs() {
    let mut rng = RandomSource::new(11);
    let e = 10_000;
    let mut ledger = CopyLedger::classical();
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
        assert!((est - f).abs() <= 3.0 * sigma.max(1e-12), "f={f} est={est}");
    }
}

fn rmse(pairs: &[(PureState, PureState)], e: u64, repeats: usize, rng: &mut RandomSource) -> f64 {
    let mut ledger = CopyLedger::classical();
    let mut sq = 0.0;
    let mut count = 0;
    for (a, b) in pairs {
        let f = fidelity(a, b).unwrap();
        for _ in 0..repeats {
            let est = cswap_estimate((a, Holder::Unknown), (b, Holder::Training(0)), e, rng, &mut ledger).unwrap();
            sq += (est - f).powi(2);
            count += 1;
        }
    }
    (sq / count as f64).sqrt()
}

#[test]
fn error_shrinks_as_inverse_square_root() {
    let mut rng = RandomSource::new(12);
    let pairs: Vec<(PureState, PureState)> = (0..20)
        .map(|_| {
            (
                haar_random_state(1, &mut rng).unwrap(),
                haar_random_state(1, &mut rng).unwrap(),
            )
        })
        .collect();
    let es = [100u64, 1_000, 10_000];
    let points: Vec<(f64, f64)> = es
        .iter()
        .map(|&e| ((e as f64).ln(), rmse(&pairs, e, 200, &mut rng).ln()))
        .collect();
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn exact_similarity_matches_analytic_gram() {
    let mut rng = RandomSource::new(13);
    let states: Vec<(PureState, Label)> = (0..6)
        .map(|i| (haar_random_state(3, &mut rng).unwrap(), i % 2))
        .collect();
    let ds = QuantumDataset::from_labeled(states, CopyMode::Classical).unwrap();
    let sim = similarity_matrix(&ds, Repetitions::Exact, &mut rng, &mut CopyLedger::classical()).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let f = fidelity(&ds.items()[i].state, &ds.items()[j].state).unwrap();
            assert!((sim.get(i, j) - f).abs() <= 1e-12);
        }
    }
    assert!(similarity_matrix(&ds, Repetitions::Exact, &mut rng, &mut CopyLedger::finite(10)).is_err());
}

#[test]
fn sampled_similarity_costs_and_round_trips() {
    let mut rng = RandomSource::new(14);
    let n = 5;
    let states: Vec<(PureState, Label)> = (0..n)
        .map(|i| (haar_random_state(2, &mut rng).unwrap(), i as Label))
        .collect();
    let ds = QuantumDataset::from_labeled(states, CopyMode::Finite(400)).unwrap();
    let mut ledger = CopyLedger::finite(400);
    let sim = similarity_matrix(&ds, Repetitions::Shots(100), &mut rng, &mut ledger).unwrap();
    for id in 0..n {
        assert_eq!(ledger.training_consumed(id), 100 * (n as u64 - 1));
    }
    assert!(similarity_matrix(&ds, Repetitions::Shots(1), &mut rng, &mut ledger).is_err());
    let mut buf = Vec::new();
    sim.write_csv(&mut buf).unwrap();
    let back = SimilarityMatrix::read_csv(buf.as_slice(), Repetitions::Shots(100)).unwrap();
    assert_eq!(back, sim);
    assert_eq!(SimilarityMatrix::from_json(&sim.to_json().unwrap()).unwrap(), sim);
}

/// States whose pairwise fidelities are all at most 0.9.
fn separated_dataset(rng: &mut RandomSource) -> QuantumDataset {
    loop {
        let states: Vec<PureState> = (0..4).map(|_| haar_random_state(2, rng).unwrap()).collect();
        let ok = (0..4).all(|i| ((i + 1)..4).all(|j| fidelity(&states[i], &states[j]).unwrap() <= 0.9));
        if ok {
            let labeled = states
                .into_iter()
                .enumerate()
                .map(|(i, s)| (s, i as Label + 1))
                .collect();
            return QuantumDataset::from_labeled(labeled, CopyMode::Classical).unwrap();
        }
    }
}

#[test]
fn identification_accuracy_grows_with_repetitions() {
    let mut rng = RandomSource::new(15);
    let datasets: Vec<QuantumDataset> = (0..10).map(|_| separated_dataset(&mut rng)).collect();
    let mut accuracies = Vec::new();
    for e in [10u64, 100, 1000] {
        let mut ledger = CopyLedger::classical();
        let mut correct = 0;
        let mut total = 0;
        for ds in &datasets {
            for item in ds.items() {
                for _ in 0..50 {
                    let label =
                        classify_via_identification(&item.state, ds, Repetitions::Shots(e), 1, &mut rng, &mut ledger)
                            .unwrap();
                    correct += usize::from(label == item.label);
                    total += 1;
                }
            }
        }
        accuracies.push(correct as f64 / total as f64);
    }
    assert!(
        accuracies[0] <= accuracies[1] && accuracies[1] <= accuracies[2],
        "{accuracies:?}"
    );
    assert!(accuracies[0] < accuracies[2], "{accuracies:?}");
    assert!(accuracies[2] > 0.95, "{accuracies:?}");
}

#[test]
fn identification_charges_e_per_training_state() {
    let mut rng = RandomSource::new(16);
    let ds = separated_dataset(&mut rng).with_declared_copies(CopyMode::Finite(30));
    let mut ledger = CopyLedger::finite(30);
    let unknown = ds.items()[2].state.clone();
    classify_via_identification(&unknown, &ds, Repetitions::Shots(30), 3, &mut rng, &mut ledger).unwrap();
    assert_eq!(ledger.unknown_consumed(), 30 * 4);
    assert!((0..4).all(|i| ledger.training_consumed(i) == 30));
}
