//! The `audit` subcommand: every PGM bound on a corpus of ensembles.

use std::io::Write;

use qsclass_core::bounds::{
    audit_bounds, audit_corpus, names, random_corpus, violation_rate, write_audit_csv, BoundReport, IndexRange,
    Interpretation,
};
use qsclass_core::exec::Execution;
use qsclass_core::swap_test::Repetitions;
use qsclass_core::{CopyMode, Error, RandomSource, Result};

use crate::config::DatasetSource;
use crate::generate::resolve;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub seed: u64,
    /// A single dataset to audit; `None` audits the random corpus.
    pub dataset: Option<DatasetSource>,
    pub ensembles: usize,
    /// Swap-test repetitions for the similarity matrix; `None` is exact.
    pub repetitions: Option<u64>,
}

pub fn audit(config: &AuditConfig) -> Result<Vec<BoundReport>> {
    let repetitions = match config.repetitions {
        Some(0) => return Err(Error::InvalidConfig("swap test needs at least one repetition".into())),
        Some(e) => Repetitions::Shots(e),
        None => Repetitions::Exact,
    };
    match &config.dataset {
        Some(source) => {
            let ds = resolve(source, config.seed)?;
            if ds.declared_copies() != CopyMode::Classical {
                return Err(Error::InvalidConfig("the audit needs a classical-mode dataset".into()));
            }
            audit_bounds(0, &ds, repetitions, &mut RandomSource::substream(config.seed, 1))
        }
        None => {
            if config.ensembles == 0 {
                return Err(Error::InvalidConfig("the corpus needs at least one ensemble".into()));
            }
            let corpus = random_corpus(config.ensembles, config.seed)?;
            audit_corpus(&corpus, repetitions, config.seed, Execution::default())
        }
    }
}

pub fn write<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    write_audit_csv(reports, out)
}

pub fn summary_line(reports: &[BoundReport]) -> String {
    let ensembles = reports
        .iter()
        .map(|r| r.ensemble_id)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let failed = reports.iter().filter(|r| !r.holds).count();
    let rate = |name, tag| violation_rate(reports, name, tag).map_or_else(|| "n/a".into(), |v| format!("{:.4}", v));
    format!(
        "{ensembles} ensembles, {} rows, {failed} violations; strict lower bound violation rate {}, eigenvalue ({}) violation rate {}",
        reports.len(),
        rate(names::PAIRWISE_LOWER, IndexRange::Strict.tag()),
        Interpretation::Fidelity.tag(),
        rate(names::EIGENVALUE, Interpretation::Fidelity.tag()),
    )
}
