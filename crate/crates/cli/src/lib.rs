//! Experiment runner for the `qsclass` binary.
//!
//! Each subcommand is a plain function over an explicit configuration so the
//! integration and acceptance tests can drive it without spawning processes.

pub mod audit;
pub mod config;
pub mod cost_table;
pub mod generate;
pub mod run;

use qsclass_core::Error;

pub use config::{DatasetSource, ExperimentConfig, GeneratorSpec, OracleChoice, ReductionKind, WeightScheme};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Process exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        Error::InvalidConfig(_)
        | Error::InvalidConstant { .. }
        | Error::InvalidDataset(_)
        | Error::InvalidPrior(_)
        | Error::InvalidState(_)
        | Error::EmptyClass(_)
        | Error::AllZeroWeights
        | Error::DuplicateStates(..)
        | Error::DimensionMismatch { .. }
        | Error::DegenerateDataset(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}
