//! Learning reductions built on a binary learner (normally the Helstrom
//! oracle): costing for weighted binary classification, one-against-all and
//! binary-tree reductions for multiclass classification, and state
//! identification as the `k = n` special case of the tree.
//!
//! Every training routine charges the learner's copies to the ledger; every
//! classification routine charges one copy of the unknown state per binary
//! measurement.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{error_rate, CopyLedger, Holder};
use crate::measurement::{majority_vote, measure, BinaryLearner, Measurable, Povm};
use crate::numerics::{self, RandomSource};
use crate::states::{class_mixture, fidelity, Label, PureState, QuantumDataset, NEGATIVE, POSITIVE};

/// Consecutive single-class resamples tolerated before giving up.
pub const MAX_RESAMPLES: usize = 100;
/// Largest class count for which the max-trace split is searched exhaustively.
pub const EXHAUSTIVE_SPLIT_LIMIT: usize = 12;

/// Keeps each item with probability `w_i / c` and gives the kept items
/// uniform weights. Copies of rejected items are not consumed.
pub fn rejection_sampling(ds: &QuantumDataset, c: f64, rng: &mut RandomSource) -> Result<QuantumDataset> {
    let max_weight = ds.items().iter().map(|i| i.weight).fold(0.0, f64::max);
    if !(c > 0.0 && c >= max_weight) {
        return Err(Error::InvalidConstant { c, max_weight });
    }
    let kept: Vec<usize> = ds
        .items()
        .iter()
        .enumerate()
        .filter(|(_, item)| rng.bernoulli(item.weight / c))
        .map(|(pos, _)| pos)
        .collect();
    if kept.is_empty() {
        return Err(Error::DegenerateDataset("rejection sampling kept no item".into()));
    }
    Ok(ds.select(&kept, ds.label_set().to_vec())?.uniform())
}

/// How each costing round obtains its training distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResampleMode {
    /// Rejection sampling with a fresh coin per item.
    Sampled,
    /// The expected resample: weights `w_i / c`, no randomness.
    Expected,
}

/// Majority vote over `T` binary classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedClassifier {
    classifiers: Vec<Povm>,
}

impl AggregatedClassifier {
    pub fn new(classifiers: Vec<Povm>) -> Result<Self> {
        let Some(first) = classifiers.first() else {
            return Err(Error::InvalidConfig("aggregate needs at least one classifier".into()));
        };
        if let Some(bad) = classifiers.iter().find(|p| p.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: bad.dim(),
            });
        }
        Ok(Self { classifiers })
    }

    pub fn classifiers(&self) -> &[Povm] {
        &self.classifiers
    }

    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    /// Exact probability that the majority vote outputs `label` on `state`.
    pub fn probability_of<S: Measurable + ?Sized>(&self, state: &S, label: Label) -> Result<f64> {
        // distribution of the number of +1 votes
        let mut dist = vec![1.0];
        for f in &self.classifiers {
            let p = f.probability_of(state, POSITIVE)?;
            let mut next = vec![0.0; dist.len() + 1];
            for (k, &q) in dist.iter().enumerate() {
                next[k] += q * (1.0 - p);
                next[k + 1] += q * p;
            }
            dist = next;
        }
        let t = self.classifiers.len();
        let plus_wins: f64 = dist.iter().enumerate().filter(|(k, _)| 2 * k > t).map(|(_, q)| q).sum();
        Ok(if label == POSITIVE { plus_wins } else { 1.0 - plus_wins })
    }
}

/// Trains `T` classifiers, each on its own rejection-sampled dataset.
///
/// `c` defaults to the largest weight. Resamples with fewer than two classes
/// are redrawn up to [`MAX_RESAMPLES`] times. Under a copy-charging learner
/// every state is either consumed or set aside `copies_per_call` times per
/// round, so consumed plus set-aside equals `T * t_bin` for every state.
pub fn costing_train<L: BinaryLearner + ?Sized>(
    ds: &QuantumDataset,
    rounds: usize,
    c: Option<f64>,
    mode: ResampleMode,
    learner: &L,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<AggregatedClassifier> {
    if rounds == 0 {
        return Err(Error::InvalidConfig("costing needs T >= 1".into()));
    }
    if !ds.is_binary() {
        return Err(Error::InvalidDataset("costing needs labels [-1, 1]".into()));
    }
    let max_weight = ds.items().iter().map(|i| i.weight).fold(0.0, f64::max);
    let c = c.unwrap_or(max_weight);
    if !(c > 0.0 && c >= max_weight) {
        return Err(Error::InvalidConstant { c, max_weight });
    }
    let mut classifiers = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let resample = match mode {
            ResampleMode::Expected => {
                let w: Vec<f64> = ds.items().iter().map(|i| i.weight / c).collect();
                ds.with_weights(&w)?
            }
            ResampleMode::Sampled => draw_two_class_resample(ds, c, rng)?,
        };
        let kept: BTreeSet<usize> = resample.ids().collect();
        for id in ds.ids().filter(|id| !kept.contains(id)) {
            ledger.set_aside(id, learner.copies_per_call());
        }
        classifiers.push(learner.learn(&resample, ledger)?);
    }
    AggregatedClassifier::new(classifiers)
}

fn draw_two_class_resample(ds: &QuantumDataset, c: f64, rng: &mut RandomSource) -> Result<QuantumDataset> {
    for _ in 0..MAX_RESAMPLES {
        match rejection_sampling(ds, c, rng) {
            Ok(r) if r.present_labels().len() == 2 => return Ok(r),
            Ok(_) | Err(Error::DegenerateDataset(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateDataset(format!(
        "{MAX_RESAMPLES} consecutive resamples had fewer than two classes"
    )))
}

/// Measures one copy per classifier and returns the majority (ties to -1).
pub fn costing_classify<S: Measurable + ?Sized>(
    agg: &AggregatedClassifier,
    unknown: &S,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<Label> {
    ledger.check(Holder::Unknown, agg.len() as u64)?;
    let votes = agg
        .classifiers
        .iter()
        .map(|f| measure(f, unknown, rng, ledger))
        .collect::<Result<Vec<_>>>()?;
    Ok(majority_vote(&votes))
}

/// One binary discriminator per class; outcome `-1` means "belongs to this class".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsAllClassifier {
    per_class: Vec<(Label, Povm)>,
}

impl OneVsAllClassifier {
    pub fn per_class(&self) -> &[(Label, Povm)] {
        &self.per_class
    }

    pub fn classes(&self) -> Vec<Label> {
        self.per_class.iter().map(|(l, _)| *l).collect()
    }

    /// Exact probability of predicting `label`, summed over click patterns.
    pub fn probability_of<S: Measurable + ?Sized>(&self, state: &S, label: Label) -> Result<f64> {
        let k = self.per_class.len();
        if k > 20 {
            return Err(Error::InvalidConfig(format!(
                "exact evaluation over 2^{k} click patterns"
            )));
        }
        let target = self
            .per_class
            .iter()
            .position(|(l, _)| *l == label)
            .ok_or(Error::LabelMismatch(label))?;
        let click: Vec<f64> = self
            .per_class
            .iter()
            .map(|(_, f)| f.probability_of(state, NEGATIVE))
            .collect::<Result<_>>()?;
        let mut total = 0.0;
        for mask in 0u32..(1 << k) {
            let mut p = 1.0;
            for (j, &c) in click.iter().enumerate() {
                p *= if mask & (1 << j) != 0 { c } else { 1.0 - c };
            }
            let clicks = mask.count_ones();
            total += if clicks == 0 {
                p / k as f64
            } else if mask & (1 << target) != 0 {
                p / clicks as f64
            } else {
                0.0
            };
        }
        Ok(total)
    }
}

/// Relabels `y_i` to `1 - 2 I{y_i = class}` and trains one classifier per class.
pub fn one_vs_all_train<L: BinaryLearner + ?Sized>(
    ds: &QuantumDataset,
    learner: &L,
    ledger: &mut CopyLedger,
) -> Result<OneVsAllClassifier> {
    let classes = ds.label_set().to_vec();
    if classes.len() < 2 {
        return Err(Error::InvalidDataset("one-against-all needs k >= 2 classes".into()));
    }
    if let Some(&empty) = classes.iter().find(|&&c| ds.class_size(c) == 0) {
        return Err(Error::EmptyClass(empty));
    }
    let per_class = classes
        .into_iter()
        .map(|class| {
            let relabeled = ds.relabel(vec![NEGATIVE, POSITIVE], |i| {
                if i.label == class {
                    NEGATIVE
                } else {
                    POSITIVE
                }
            })?;
            Ok((class, learner.learn(&relabeled, ledger)?))
        })
        .collect::<Result<_>>()?;
    Ok(OneVsAllClassifier { per_class })
}

/// Applies every per-class classifier to a fresh copy. One click returns
/// that class, several clicks a uniform choice among them, none a uniform
/// choice among all classes.
pub fn one_vs_all_classify<S: Measurable + ?Sized>(
    cls: &OneVsAllClassifier,
    unknown: &S,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<Label> {
    ledger.check(Holder::Unknown, cls.per_class.len() as u64)?;
    let mut clicked = Vec::new();
    for (class, f) in &cls.per_class {
        if measure(f, unknown, rng, ledger)? == NEGATIVE {
            clicked.push(*class);
        }
    }
    Ok(match clicked.len() {
        0 => cls.per_class[rng.index(cls.per_class.len())].0,
        1 => clicked[0],
        n => clicked[rng.index(n)],
    })
}

/// How an internal tree node partitions its classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitRule {
    RandomBalanced,
    /// Balanced split maximizing the trace distance between the two halves.
    /// Needs classical descriptions.
    MaxTraceDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf(Label),
    Split {
        povm: Povm,
        /// Reached on outcome `-1`.
        left_classes: Vec<Label>,
        right_classes: Vec<Label>,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn internal_nodes(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { left, right, .. } => 1 + left.internal_nodes() + right.internal_nodes(),
        }
    }

    fn classes(&self) -> Vec<Label> {
        match self {
            TreeNode::Leaf(l) => vec![*l],
            TreeNode::Split {
                left_classes,
                right_classes,
                ..
            } => left_classes.iter().chain(right_classes).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeClassifier {
    root: TreeNode,
}

impl TreeClassifier {
    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn internal_nodes(&self) -> usize {
        self.root.internal_nodes()
    }

    pub fn classes(&self) -> Vec<Label> {
        self.root.classes()
    }

    /// Exact probability that traversal ends in the leaf for `label`.
    pub fn probability_of<S: Measurable + ?Sized>(&self, state: &S, label: Label) -> Result<f64> {
        let mut node = &self.root;
        let mut p = 1.0;
        loop {
            match node {
                TreeNode::Leaf(l) => return Ok(if *l == label { p } else { 0.0 }),
                TreeNode::Split {
                    povm,
                    left_classes,
                    right_classes,
                    left,
                    right,
                } => {
                    if left_classes.contains(&label) {
                        p *= povm.probability_of(state, NEGATIVE)?;
                        node = left;
                    } else if right_classes.contains(&label) {
                        p *= povm.probability_of(state, POSITIVE)?;
                        node = right;
                    } else {
                        return Err(Error::LabelMismatch(label));
                    }
                }
            }
        }
    }
}

fn node_dataset(ds: &QuantumDataset, left: &[Label], right: &[Label]) -> Result<QuantumDataset> {
    let positions: Vec<usize> = ds
        .items()
        .iter()
        .enumerate()
        .filter(|(_, i)| left.contains(&i.label) || right.contains(&i.label))
        .map(|(p, _)| p)
        .collect();
    ds.select(&positions, ds.label_set().to_vec())?
        .relabel(vec![NEGATIVE, POSITIVE], |i| {
            if left.contains(&i.label) {
                NEGATIVE
            } else {
                POSITIVE
            }
        })
}

/// `Tr|p_a rho_a - p_b rho_b|` for the node separating `left` from `right`.
fn split_trace_distance(ds: &QuantumDataset, left: &[Label], right: &[Label]) -> Result<f64> {
    let node = node_dataset(ds, left, right)?;
    let (rho_a, p_a) = class_mixture(&node, NEGATIVE)?;
    let (rho_b, p_b) = class_mixture(&node, POSITIVE)?;
    numerics::trace_norm(&(rho_a.matrix().scale(p_a) - rho_b.matrix().scale(p_b)))
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    out
}

fn partition(classes: &[Label], left_positions: &[usize]) -> (Vec<Label>, Vec<Label>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, &c) in classes.iter().enumerate() {
        if left_positions.contains(&i) {
            left.push(c);
        } else {
            right.push(c);
        }
    }
    (left, right)
}

type Split = (Vec<Label>, Vec<Label>);

fn max_trace_split(ds: &QuantumDataset, classes: &[Label]) -> Result<Split> {
    let k = classes.len();
    let half = k.div_ceil(2);
    if k <= EXHAUSTIVE_SPLIT_LIMIT {
        let mut best: Option<(f64, Split)> = None;
        for combo in combinations(k, half) {
            // each unordered split once: fix classes[0] on the left for even k
            if k.is_multiple_of(2) && combo[0] != 0 {
                continue;
            }
            let (l, r) = partition(classes, &combo);
            let score = split_trace_distance(ds, &l, &r)?;
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, (l, r)));
            }
        }
        return Ok(best.expect("k >= 2").1);
    }
    let mut left: Vec<Label> = classes[..half].to_vec();
    let mut right: Vec<Label> = classes[half..].to_vec();
    let mut score = split_trace_distance(ds, &left, &right)?;
    loop {
        let mut improved = None;
        for a in 0..left.len() {
            for b in 0..right.len() {
                let (mut l, mut r) = (left.clone(), right.clone());
                std::mem::swap(&mut l[a], &mut r[b]);
                let s = split_trace_distance(ds, &l, &r)?;
                if s > score + 1e-12 && improved.as_ref().is_none_or(|(best, _, _)| s > *best) {
                    improved = Some((s, l, r));
                }
            }
        }
        match improved {
            Some((s, l, r)) => {
                score = s;
                left = l;
                right = r;
            }
            None => return Ok((left, right)),
        }
    }
}

fn choose_split(
    ds: &QuantumDataset,
    classes: &[Label],
    rule: SplitRule,
    rng: &mut RandomSource,
) -> Result<(Vec<Label>, Vec<Label>)> {
    let (mut left, mut right) = match rule {
        SplitRule::RandomBalanced => {
            let mut shuffled = classes.to_vec();
            rng.shuffle(&mut shuffled);
            let half = classes.len().div_ceil(2);
            (shuffled[..half].to_vec(), shuffled[half..].to_vec())
        }
        SplitRule::MaxTraceDistance => max_trace_split(ds, classes)?,
    };
    left.sort_unstable();
    right.sort_unstable();
    Ok((left, right))
}

fn build_node<L: BinaryLearner + ?Sized>(
    ds: &QuantumDataset,
    learner: &L,
    rule: SplitRule,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<TreeNode> {
    let classes = ds.present_labels();
    if classes.len() == 1 {
        return Ok(TreeNode::Leaf(classes[0]));
    }
    let (left_classes, right_classes) = choose_split(ds, &classes, rule, rng)?;
    let node = node_dataset(ds, &left_classes, &right_classes)?;
    let povm = learner.learn(&node, ledger)?;
    let subset = |side: &[Label]| -> Result<QuantumDataset> {
        let positions: Vec<usize> = ds
            .items()
            .iter()
            .enumerate()
            .filter(|(_, i)| side.contains(&i.label))
            .map(|(p, _)| p)
            .collect();
        ds.select(&positions, side.to_vec())
    };
    let left = build_node(&subset(&left_classes)?, learner, rule, rng, ledger)?;
    let right = build_node(&subset(&right_classes)?, learner, rule, rng, ledger)?;
    Ok(TreeNode::Split {
        povm,
        left_classes,
        right_classes,
        left: Box::new(left),
        right: Box::new(right),
    })
}

/// Recursive balanced binary tree of Helstrom discriminators. Each level of
/// the tree calls the learner once on every state, so a copy-charging
/// learner costs `t_bin` per state per level.
pub fn tree_train<L: BinaryLearner + ?Sized>(
    ds: &QuantumDataset,
    learner: &L,
    rule: SplitRule,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<TreeClassifier> {
    if rule == SplitRule::MaxTraceDistance && !ledger.is_classical() {
        return Err(Error::InvalidConfig(
            "the max-trace split needs classical descriptions".into(),
        ));
    }
    if let Some(&empty) = ds.label_set().iter().find(|&&c| ds.class_size(c) == 0) {
        return Err(Error::EmptyClass(empty));
    }
    Ok(TreeClassifier {
        root: build_node(ds, learner, rule, rng, ledger)?,
    })
}

/// Root-to-leaf traversal; outcome `-1` goes left. One copy per node visited.
pub fn tree_classify<S: Measurable + ?Sized>(
    tree: &TreeClassifier,
    unknown: &S,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<Label> {
    let mut node = &tree.root;
    loop {
        match node {
            TreeNode::Leaf(l) => return Ok(*l),
            TreeNode::Split { povm, left, right, .. } => {
                node = if measure(povm, unknown, rng, ledger)? == NEGATIVE {
                    left
                } else {
                    right
                };
            }
        }
    }
}

/// Exact error of every internal node on its own binary sub-problem, in
/// pre-order.
pub fn tree_node_errors(tree: &TreeClassifier, ds: &QuantumDataset) -> Result<Vec<f64>> {
    fn walk(node: &TreeNode, ds: &QuantumDataset, out: &mut Vec<f64>) -> Result<()> {
        if let TreeNode::Split {
            povm,
            left_classes,
            right_classes,
            left,
            right,
        } = node
        {
            out.push(error_rate(povm, &node_dataset(ds, left_classes, right_classes)?)?);
            walk(left, ds, out)?;
            walk(right, ds, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(&tree.root, ds, &mut out)?;
    Ok(out)
}

/// Probability that a demon-scenario trial on `ds` visits each internal
/// node, in the same pre-order as [`tree_node_errors`]. The tree error is at
/// most the mass-weighted sum of node errors.
pub fn tree_node_masses(tree: &TreeClassifier, ds: &QuantumDataset) -> Result<Vec<f64>> {
    fn walk(node: &TreeNode, mass_of: &dyn Fn(&[Label]) -> f64, out: &mut Vec<f64>) {
        if let TreeNode::Split { left, right, .. } = node {
            out.push(mass_of(&node.classes()));
            walk(left, mass_of, out);
            walk(right, mass_of, out);
        }
    }
    let p = ds.normalized_weights()?;
    let mass_of = |classes: &[Label]| -> f64 {
        ds.items()
            .iter()
            .zip(&p)
            .filter(|(i, _)| classes.contains(&i.label))
            .map(|(_, w)| w)
            .sum()
    };
    let mut out = Vec::new();
    walk(&tree.root, &mass_of, &mut out);
    Ok(out)
}

/// Exact error of each per-class discriminator on its relabeled dataset.
pub fn one_vs_all_node_errors(cls: &OneVsAllClassifier, ds: &QuantumDataset) -> Result<Vec<f64>> {
    cls.per_class
        .iter()
        .map(|(class, povm)| {
            let relabeled = ds.relabel(vec![NEGATIVE, POSITIVE], |i| {
                if i.label == *class {
                    NEGATIVE
                } else {
                    POSITIVE
                }
            })?;
            error_rate(povm, &relabeled)
        })
        .collect()
}

/// Dataset in which every state is its own class `1..=n`.
pub fn identification_dataset(ds: &QuantumDataset) -> Result<QuantumDataset> {
    let n = ds.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if fidelity(&ds.items()[i].state, &ds.items()[j].state)? > 1.0 - 1e-12 {
                return Err(Error::DuplicateStates(i, j));
            }
        }
    }
    let items = ds
        .items()
        .iter()
        .enumerate()
        .map(|(p, item)| crate::states::LabeledState {
            label: p as Label + 1,
            ..item.clone()
        })
        .collect();
    QuantumDataset::new(items, (1..=n as Label).collect(), ds.declared_copies())
}

/// Identifies which training state `unknown` is by classifying with a tree
/// over `n` singleton classes. Returns the position in `ds`.
pub fn identify_state<L: BinaryLearner + ?Sized>(
    unknown: &PureState,
    ds: &QuantumDataset,
    learner: &L,
    rng: &mut RandomSource,
    ledger: &mut CopyLedger,
) -> Result<usize> {
    let singleton = identification_dataset(ds)?;
    let tree = tree_train(&singleton, learner, SplitRule::RandomBalanced, rng, ledger)?;
    Ok((tree_classify(&tree, unknown, rng, ledger)? - 1) as usize)
}

/// A trained classifier from any of the pipelines, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reduction", rename_all = "snake_case")]
pub enum ClassifierBundle {
    Binary {
        povm: Povm,
    },
    WeightedHelstrom {
        povm: Povm,
    },
    Costing {
        rounds: usize,
        c: f64,
        resample: ResampleMode,
        classifier: AggregatedClassifier,
    },
    OneVsAll {
        classifier: OneVsAllClassifier,
    },
    Tree {
        split_rule: SplitRule,
        classifier: TreeClassifier,
    },
    Pgm {
        povm: Povm,
    },
}

impl ClassifierBundle {
    pub fn classify<S: Measurable + ?Sized>(
        &self,
        unknown: &S,
        rng: &mut RandomSource,
        ledger: &mut CopyLedger,
    ) -> Result<Label> {
        match self {
            ClassifierBundle::Binary { povm }
            | ClassifierBundle::WeightedHelstrom { povm }
            | ClassifierBundle::Pgm { povm } => measure(povm, unknown, rng, ledger),
            ClassifierBundle::Costing { classifier, .. } => costing_classify(classifier, unknown, rng, ledger),
            ClassifierBundle::OneVsAll { classifier } => one_vs_all_classify(classifier, unknown, rng, ledger),
            ClassifierBundle::Tree { classifier, .. } => tree_classify(classifier, unknown, rng, ledger),
        }
    }

    /// Exact probability of answering `label` on `state`.
    pub fn probability_of<S: Measurable + ?Sized>(&self, state: &S, label: Label) -> Result<f64> {
        match self {
            ClassifierBundle::Binary { povm }
            | ClassifierBundle::WeightedHelstrom { povm }
            | ClassifierBundle::Pgm { povm } => {
                if povm.element_for(label).is_none() {
                    return Ok(0.0);
                }
                povm.probability_of(state, label)
            }
            ClassifierBundle::Costing { classifier, .. } => classifier.probability_of(state, label),
            ClassifierBundle::OneVsAll { classifier } => classifier.probability_of(state, label),
            ClassifierBundle::Tree { classifier, .. } => classifier.probability_of(state, label),
        }
    }

    /// Exact weighted misclassification probability on `ds`.
    pub fn exact_error(&self, ds: &QuantumDataset) -> Result<f64> {
        let p = ds.normalized_weights()?;
        let mut err = 0.0;
        for (item, w) in ds.items().iter().zip(p) {
            err += w * (1.0 - self.probability_of(&item.state, item.label)?);
        }
        Ok(err.clamp(0.0, 1.0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
