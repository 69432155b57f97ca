//! Copy accounting for the finite-copy and classical learning regimes.
//!
//! Training cost is tracked per training state (calls to the oracle times
//! copies per call); classification cost is the number of copies of the
//! unknown state. Under [`CopyMode::Classical`] training is free and recorded
//! as zero.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Povm;
use crate::states::QuantumDataset;

/// Learning regime: `s` copies of each training state, or full classical descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CopyMode {
    Classical,
    Finite(u64),
}

/// Owner of the copies being consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holder {
    Training(usize),
    Unknown,
}

impl fmt::Display for Holder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Holder::Training(i) => write!(f, "training state {i}"),
            Holder::Unknown => write!(f, "unknown state"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopyLedger {
    mode: CopyMode,
    consumed: BTreeMap<usize, u64>,
    set_aside: BTreeMap<usize, u64>,
    unknown_consumed: u64,
    unknown_budget: Option<u64>,
}

impl CopyLedger {
    pub fn new(mode: CopyMode) -> Self {
        Self {
            mode,
            consumed: BTreeMap::new(),
            set_aside: BTreeMap::new(),
            unknown_consumed: 0,
            unknown_budget: None,
        }
    }

    pub fn classical() -> Self {
        Self::new(CopyMode::Classical)
    }

    pub fn finite(copies: u64) -> Self {
        Self::new(CopyMode::Finite(copies))
    }

    /// Caps the copies of the unknown state available for classification.
    pub fn with_unknown_budget(mut self, copies: u64) -> Self {
        self.unknown_budget = Some(copies);
        self
    }

    pub fn mode(&self) -> CopyMode {
        self.mode
    }

    pub fn is_classical(&self) -> bool {
        self.mode == CopyMode::Classical
    }

    /// Copies still available for a training state; `None` when unlimited.
    pub fn remaining(&self, state: usize) -> Option<u64> {
        match self.mode {
            CopyMode::Classical => None,
            CopyMode::Finite(s) => Some(s.saturating_sub(self.training_consumed(state))),
        }
    }

    pub fn remaining_unknown(&self) -> Option<u64> {
        self.unknown_budget.map(|b| b.saturating_sub(self.unknown_consumed))
    }

    fn check_training(&self, state: usize, count: u64) -> Result<()> {
        match self.remaining(state) {
            Some(remaining) if remaining < count => Err(Error::BudgetExhausted {
                holder: Holder::Training(state),
                requested: count,
                remaining,
            }),
            _ => Ok(()),
        }
    }

    pub fn consume_training(&mut self, state: usize, count: u64) -> Result<()> {
        self.check_training(state, count)?;
        if !self.is_classical() && count > 0 {
            *self.consumed.entry(state).or_default() += count;
        }
        Ok(())
    }

    /// Debits `count` copies from every listed state, or from none of them.
    pub fn consume_training_all(&mut self, states: impl IntoIterator<Item = usize> + Clone, count: u64) -> Result<()> {
        for s in states.clone() {
            self.check_training(s, count)?;
        }
        for s in states {
            self.consume_training(s, count)?;
        }
        Ok(())
    }

    /// Records copies that were drawn but returned to the pool unused.
    pub fn set_aside(&mut self, state: usize, count: u64) {
        if !self.is_classical() && count > 0 {
            *self.set_aside.entry(state).or_default() += count;
        }
    }

    pub fn consume_unknown(&mut self, count: u64) -> Result<()> {
        if let Some(remaining) = self.remaining_unknown() {
            if remaining < count {
                return Err(Error::BudgetExhausted {
                    holder: Holder::Unknown,
                    requested: count,
                    remaining,
                });
            }
        }
        self.unknown_consumed += count;
        Ok(())
    }

    /// Fails with `BudgetExhausted` if `count` copies are not available.
    pub fn check(&self, holder: Holder, count: u64) -> Result<()> {
        match holder {
            Holder::Training(i) => self.check_training(i, count),
            Holder::Unknown => match self.remaining_unknown() {
                Some(remaining) if remaining < count => Err(Error::BudgetExhausted {
                    holder,
                    requested: count,
                    remaining,
                }),
                _ => Ok(()),
            },
        }
    }

    pub fn consume(&mut self, holder: Holder, count: u64) -> Result<()> {
        match holder {
            Holder::Training(i) => self.consume_training(i, count),
            Holder::Unknown => self.consume_unknown(count),
        }
    }

    pub fn training_consumed(&self, state: usize) -> u64 {
        self.consumed.get(&state).copied().unwrap_or(0)
    }

    pub fn training_set_aside(&self, state: usize) -> u64 {
        self.set_aside.get(&state).copied().unwrap_or(0)
    }

    /// Largest per-state training consumption: the per-state training cost.
    pub fn max_training_consumed(&self) -> u64 {
        self.consumed.values().copied().max().unwrap_or(0)
    }

    pub fn total_training_consumed(&self) -> u64 {
        self.consumed.values().sum()
    }

    pub fn unknown_consumed(&self) -> u64 {
        self.unknown_consumed
    }

    /// Sums another ledger's counters into this one.
    pub fn merge(&mut self, other: &CopyLedger) {
        for (&k, &v) in &other.consumed {
            *self.consumed.entry(k).or_default() += v;
        }
        for (&k, &v) in &other.set_aside {
            *self.set_aside.entry(k).or_default() += v;
        }
        self.unknown_consumed += other.unknown_consumed;
    }
}

/// Exact (weighted) training error of a classifier POVM on a dataset:
/// `sum_i p_i (1 - <psi_i| E_{y_i} |psi_i>)`.
pub fn error_rate(povm: &Povm, ds: &QuantumDataset) -> Result<f64> {
    let p = ds.normalized_weights()?;
    let mut err = 0.0;
    for (item, w) in ds.items().iter().zip(p) {
        let element = povm.element_for(item.label).ok_or(Error::LabelMismatch(item.label))?;
        let correct = crate::numerics::expectation(element, item.state.amplitudes());
        err += w * (1.0 - correct);
    }
    Ok(err.clamp(0.0, 1.0))
}

pub fn regret(error: f64, optimal_error: f64) -> Result<f64> {
    let r = error - optimal_error;
    if r < -1e-6 {
        return Err(Error::InvalidRange {
            error,
            optimal: optimal_error,
        });
    }
    Ok(r.max(0.0))
}

/// Training and classification cost of one task, symbolic and measured.
/// `None` means the cost does not apply to the task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub task: String,
    pub training_symbolic: String,
    pub training_measured: Option<u64>,
    pub classification_symbolic: String,
    pub classification_measured: Option<u64>,
}

impl CostReport {
    /// Reads measured values from a ledger: the per-state maximum for
    /// training, the unknown-state counter for classification.
    pub fn from_ledger(
        task: impl Into<String>,
        training_symbolic: impl Into<String>,
        classification_symbolic: impl Into<String>,
        ledger: &CopyLedger,
    ) -> Self {
        Self {
            task: task.into(),
            training_symbolic: training_symbolic.into(),
            training_measured: Some(ledger.max_training_consumed()),
            classification_symbolic: classification_symbolic.into(),
            classification_measured: Some(ledger.unknown_consumed()),
        }
    }
}

pub const COST_CSV_HEADER: [&str; 5] = [
    "task",
    "training_cost_symbolic",
    "training_cost_measured",
    "classification_cost_symbolic",
    "classification_cost_measured",
];

fn measured(v: Option<u64>) -> String {
    v.map_or_else(|| "not applicable".to_string(), |x| x.to_string())
}

pub fn write_cost_csv<W: Write>(reports: &[CostReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COST_CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.task.clone(),
            r.training_symbolic.clone(),
            measured(r.training_measured),
            r.classification_symbolic.clone(),
            measured(r.classification_measured),
        ])?;
    }
    w.flush()?;
    Ok(())
}
