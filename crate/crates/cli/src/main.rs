use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsclass_cli::audit::{self, AuditConfig};
use qsclass_cli::cost_table::{cost_table, CostTableParams};
use qsclass_cli::generate::generate;
use qsclass_cli::run::{execute, summary_line, write_outputs};
use qsclass_cli::{
    exit_code, DatasetSource, ExperimentConfig, GeneratorSpec, OracleChoice, ReductionKind, WeightScheme, EXIT_CONFIG,
};
use qsclass_core::ledger::write_cost_csv;
use qsclass_core::reductions::{ResampleMode, SplitRule};
use qsclass_core::states::save_dataset;
use qsclass_core::{CopyMode, RandomSource, Result};

#[derive(Parser)]
#[command(name = "qsclass", version, about = "Quantum state classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as JSON.
    Generate(GenerateArgs),
    /// Train a pipeline and score it on Monte Carlo trials.
    Run(RunArgs),
    /// Measure the training and classification cost of every pipeline.
    CostTable(CostTableArgs),
    /// Evaluate every PGM error bound on a corpus or a single dataset.
    Audit(AuditArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    qubits: u32,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 2)]
    states: usize,
    #[arg(long, value_enum, default_value_t = Weights::Uniform)]
    weights: Weights,
    /// Copies of each training state; omit for classical descriptions.
    #[arg(long)]
    copies: Option<u64>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Uniform,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    #[value(name = "entangled_vs_separable", alias = "entangled-vs-separable")]
    EntangledVsSeparable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    Binary,
    WeightedHelstrom,
    Costing,
    Ova,
    Tree,
    Identify,
    Pgm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    V1,
    V2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    Random,
    MaxTrace,
}

#[derive(Clone, Copy, ValueEnum)]
enum Resample {
    Sampled,
    Expected,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    seed: u64,
    /// Dataset JSON path, or a generator spec such as `haar:qubits=2,classes=4,states=8`.
    #[arg(long)]
    dataset: String,
    #[arg(long, value_enum)]
    reduction: Reduction,
    #[arg(long, value_enum, default_value_t = Oracle::V1)]
    oracle: Oracle,
    #[arg(long = "t-bin", default_value_t = 1)]
    t_bin: u64,
    /// Costing rounds.
    #[arg(long = "T", default_value_t = 7)]
    rounds: usize,
    /// Rejection constant for costing; defaults to the largest weight.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum, default_value_t = Resample::Sampled)]
    resample: Resample,
    /// Swap-test repetitions for identification; omit for exact fidelities.
    #[arg(long = "e")]
    repetitions: Option<u64>,
    #[arg(long, default_value_t = 1)]
    neighbours: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, value_enum, default_value_t = Split::Random)]
    split: Split,
    /// Exploratory: classify states perturbed to this Euclidean distance.
    #[arg(long)]
    perturb: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CostTableArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long = "t-bin", default_value_t = 1)]
    t_bin: u64,
    #[arg(long = "T", default_value_t = 7)]
    rounds: u64,
    #[arg(long = "e", default_value_t = 100)]
    repetitions: u64,
    #[arg(long, default_value_t = 8)]
    classes: usize,
    #[arg(long, default_value_t = 8)]
    states: usize,
    #[arg(long, default_value_t = 3)]
    qubits: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    seed: u64,
    /// Audit one dataset (path or generator spec) instead of the random corpus.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value_t = 200)]
    ensembles: usize,
    /// Swap-test repetitions for the similarity matrix; omit for exact fidelities.
    #[arg(long = "e")]
    repetitions: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn cmd_generate(a: GenerateArgs) -> Result<String> {
    let copies = a.copies.map_or(CopyMode::Classical, CopyMode::Finite);
    let spec = match a.preset {
        Some(Preset::EntangledVsSeparable) => GeneratorSpec::EntangledVsSeparable {
            states: a.states,
            copies,
        },
        None => GeneratorSpec::Haar {
            qubits: a.qubits,
            classes: a.classes,
            states: a.states,
            weights: match a.weights {
                Weights::Uniform => WeightScheme::Uniform,
                Weights::Random => WeightScheme::Random,
            },
            copies,
        },
    };
    let ds = generate(&spec, &mut RandomSource::substream(a.seed, 0))?;
    save_dataset(&ds, &a.out)?;
    Ok(format!(
        "wrote {} states on {} qubits to {}",
        ds.len(),
        ds.qubits(),
        a.out.display()
    ))
}

fn cmd_run(a: RunArgs) -> Result<String> {
    let reduction = match a.reduction {
        Reduction::Binary => ReductionKind::Binary,
        Reduction::WeightedHelstrom => ReductionKind::WeightedHelstrom,
        Reduction::Costing => ReductionKind::Costing,
        Reduction::Ova => ReductionKind::Ova,
        Reduction::Tree => ReductionKind::Tree,
        Reduction::Identify => ReductionKind::Identify,
        Reduction::Pgm => ReductionKind::Pgm,
    };
    let dataset: DatasetSource = a.dataset.parse()?;
    let mut config = ExperimentConfig::new(a.seed, dataset, reduction);
    config.oracle = match a.oracle {
        Oracle::V1 => OracleChoice::V1,
        Oracle::V2 => OracleChoice::V2,
    };
    config.t_bin = a.t_bin;
    config.rounds = a.rounds;
    config.c = a.c;
    config.resample = match a.resample {
        Resample::Sampled => ResampleMode::Sampled,
        Resample::Expected => ResampleMode::Expected,
    };
    config.repetitions = a.repetitions;
    config.neighbours = a.neighbours;
    config.trials = a.trials;
    config.split = match a.split {
        Split::Random => SplitRule::RandomBalanced,
        Split::MaxTrace => SplitRule::MaxTraceDistance,
    };
    config.perturbation = a.perturb;
    config.out = a.out;
    let result = execute(&config)?;
    write_outputs(&result, &config.out)?;
    Ok(summary_line(&result.summary))
}

fn cmd_cost_table(a: CostTableArgs) -> Result<String> {
    let params = CostTableParams {
        seed: a.seed,
        t_bin: a.t_bin,
        rounds: a.rounds,
        repetitions: a.repetitions,
        classes: a.classes,
        states: a.states,
        qubits: a.qubits,
    };
    let rows = cost_table(&params)?;
    write_cost_csv(&rows, fs::File::create(&a.out)?)?;
    Ok(format!("wrote {} cost rows to {}", rows.len(), a.out.display()))
}

fn cmd_audit(a: AuditArgs) -> Result<String> {
    let config = AuditConfig {
        seed: a.seed,
        dataset: a.dataset.as_deref().map(str::parse).transpose()?,
        ensembles: a.ensembles,
        repetitions: a.repetitions,
    };
    let reports = audit::audit(&config)?;
    audit::write(&reports, fs::File::create(&a.out)?)?;
    Ok(audit::summary_line(&reports))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::CostTable(a) => cmd_cost_table(a),
        Command::Audit(a) => cmd_audit(a),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
