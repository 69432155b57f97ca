use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qsclass_core::reductions::{ResampleMode, SplitRule};
use qsclass_core::{CopyMode, Error, HelstromOracle, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Uniform,
    /// Independent weights uniform on `[0.1, 1]`.
    Random,
}

/// Recipe for a synthetic dataset.
///
/// Written as `haar:qubits=2,classes=3,states=9,weights=random,copies=50` or
/// `entangled_vs_separable:states=20`; omitted keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Haar {
        qubits: u32,
        classes: usize,
        states: usize,
        weights: WeightScheme,
        copies: CopyMode,
    },
    /// Two-qubit states: entangled ones labeled `-1`, product ones `+1`.
    EntangledVsSeparable { states: usize, copies: CopyMode },
}

impl GeneratorSpec {
    pub fn haar(qubits: u32, classes: usize, states: usize) -> Self {
        GeneratorSpec::Haar {
            qubits,
            classes,
            states,
            weights: WeightScheme::Uniform,
            copies: CopyMode::Classical,
        }
    }
}

fn parse_copies(v: &str) -> Result<CopyMode> {
    if v.eq_ignore_ascii_case("classical") {
        return Ok(CopyMode::Classical);
    }
    v.parse::<u64>()
        .map(CopyMode::Finite)
        .map_err(|_| Error::InvalidConfig(format!("copies must be `classical` or a count, got {v:?}")))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value {v:?} for {key}")))
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let pairs = rest
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut copies = CopyMode::Classical;
        match kind {
            "haar" => {
                let (mut qubits, mut classes, mut states, mut weights) = (1, 2, 2, WeightScheme::Uniform);
                for (k, v) in pairs {
                    match k {
                        "qubits" => qubits = parse_num(k, v)?,
                        "classes" => classes = parse_num(k, v)?,
                        "states" => states = parse_num(k, v)?,
                        "weights" => {
                            weights = match v {
                                "uniform" => WeightScheme::Uniform,
                                "random" => WeightScheme::Random,
                                _ => return Err(Error::InvalidConfig(format!("unknown weight scheme {v:?}"))),
                            }
                        }
                        "copies" => copies = parse_copies(v)?,
                        _ => return Err(Error::InvalidConfig(format!("unknown generator key {k:?}"))),
                    }
                }
                Ok(GeneratorSpec::Haar {
                    qubits,
                    classes,
                    states,
                    weights,
                    copies,
                })
            }
            "entangled_vs_separable" => {
                let mut states = 20;
                for (k, v) in pairs {
                    match k {
                        "states" => states = parse_num(k, v)?,
                        "copies" => copies = parse_copies(v)?,
                        _ => return Err(Error::InvalidConfig(format!("unknown generator key {k:?}"))),
                    }
                }
                Ok(GeneratorSpec::EntangledVsSeparable { states, copies })
            }
            _ => Err(Error::InvalidConfig(format!("unknown generator {kind:?}"))),
        }
    }
}

/// Where a run gets its dataset from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    File(PathBuf),
    Generated(GeneratorSpec),
}

impl FromStr for DatasetSource {
    type Err = Error;

    /// Generator specs are recognized by their prefix; anything else is a path.
    fn from_str(s: &str) -> Result<Self> {
        if s.starts_with("haar") || s.starts_with("entangled_vs_separable") {
            s.parse().map(DatasetSource::Generated)
        } else {
            Ok(DatasetSource::File(PathBuf::from(s)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Binary,
    WeightedHelstrom,
    Costing,
    Ova,
    Tree,
    Identify,
    Pgm,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 7] = [
        ReductionKind::Binary,
        ReductionKind::WeightedHelstrom,
        ReductionKind::Costing,
        ReductionKind::Ova,
        ReductionKind::Tree,
        ReductionKind::Identify,
        ReductionKind::Pgm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Binary => "binary",
            ReductionKind::WeightedHelstrom => "weighted-helstrom",
            ReductionKind::Costing => "costing",
            ReductionKind::Ova => "ova",
            ReductionKind::Tree => "tree",
            ReductionKind::Identify => "identify",
            ReductionKind::Pgm => "pgm",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    V1,
    V2,
}

/// Everything a `run` needs. Serialized into the run summary, except the
/// output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dataset: DatasetSource,
    pub reduction: ReductionKind,
    pub oracle: OracleChoice,
    pub t_bin: u64,
    /// Number of costing rounds `T`.
    pub rounds: usize,
    /// Rejection constant; `None` uses the largest weight.
    pub c: Option<f64>,
    pub resample: ResampleMode,
    /// Swap-test repetitions `e`; `None` means exact fidelities.
    pub repetitions: Option<u64>,
    pub neighbours: usize,
    pub split: SplitRule,
    pub trials: u64,
    /// Exploratory: classify a state at this Euclidean distance from the
    /// drawn training state instead of the state itself.
    pub perturbation: Option<f64>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(seed: u64, dataset: DatasetSource, reduction: ReductionKind) -> Self {
        Self {
            seed,
            dataset,
            reduction,
            oracle: OracleChoice::V1,
            t_bin: 1,
            rounds: 7,
            c: None,
            resample: ResampleMode::Sampled,
            repetitions: None,
            neighbours: 1,
            split: SplitRule::RandomBalanced,
            trials: 10_000,
            perturbation: None,
            out: PathBuf::from("out"),
        }
    }

    pub fn oracle(&self) -> HelstromOracle {
        match self.oracle {
            OracleChoice::V1 => HelstromOracle::v1(),
            OracleChoice::V2 => HelstromOracle::v2(self.t_bin),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("at least one trial is needed".into());
        }
        if self.oracle == OracleChoice::V2 && self.t_bin == 0 {
            return bad("oracle v2 needs t_bin >= 1".into());
        }
        if self.reduction == ReductionKind::Costing {
            if self.rounds == 0 {
                return bad("costing needs T >= 1".into());
            }
            if let Some(c) = self.c {
                if !(c > 0.0 && c.is_finite()) {
                    return bad(format!("rejection constant {c} must be positive"));
                }
            }
        }
        if self.reduction == ReductionKind::Identify {
            if self.repetitions == Some(0) {
                return bad("identification needs e >= 1".into());
            }
            if self.neighbours == 0 || self.neighbours.is_multiple_of(2) {
                return bad(format!("neighbours must be odd, got {}", self.neighbours));
            }
        }
        if let Some(eps) = self.perturbation {
            if !(eps > 0.0 && eps <= 2.0) {
                return bad(format!("perturbation distance {eps} outside (0, 2]"));
            }
        }
        Ok(())
    }
}
