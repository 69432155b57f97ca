use thiserror::Error;

use crate::ledger::Holder;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid prior distribution: {0}")]
    InvalidPrior(String),

    #[error("no item carries label {0}")]
    EmptyClass(i32),

    #[error("all weights are zero")]
    AllZeroWeights,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("copy budget exhausted for {holder}: requested {requested}, remaining {remaining}")]
    BudgetExhausted {
        holder: Holder,
        requested: u64,
        remaining: u64,
    },

    #[error("outcome probabilities sum to {sum}, beyond renormalization tolerance")]
    NumericalBreakdown { sum: f64 },

    #[error("label {0} has no matching POVM outcome")]
    LabelMismatch(i32),

    #[error("error {error} is below the optimal error {optimal}")]
    InvalidRange { error: f64, optimal: f64 },

    #[error("rejection constant {c} is smaller than the largest weight {max_weight}")]
    InvalidConstant { c: f64, max_weight: f64 },

    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    #[error("dataset contains identical states at indices {0} and {1}")]
    DuplicateStates(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
