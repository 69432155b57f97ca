//! Quantum state classification by simulation.
//!
//! Exact Helstrom and pretty good measurements, the learning reductions that
//! build multiclass and weighted classifiers out of a binary Helstrom oracle,
//! copy-budget accounting for finite-copy training, swap-test similarity
//! estimation, and exact evaluation of the error bounds on the pretty good
//! measurement.

// `!(x <= tol)` comparisons deliberately treat NaN as out of tolerance.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exec;
pub mod ledger;
pub mod measurement;
pub mod numerics;
pub mod reductions;
pub mod states;
pub mod trials;

pub use error::{Error, Result};
pub use ledger::{CopyLedger, CopyMode, CostReport, Holder};
pub use measurement::{BinaryLearner, HelstromOracle, OracleVersion, Povm};
pub use numerics::{ComplexMatrix, RandomSource, C64};
pub use states::{DensityMatrix, Label, LabeledState, PureState, QuantumDataset};
