use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use proxbell_core::harness::{run_experiment, ExperimentConfig};
use proxbell_core::verify;
use proxbell_core::OutlierModel;

#[derive(Parser)]
#[command(name = "proxbell", version, about = "Online p-norm selection for LMP filtering via proximal Bellman mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-trial experiment and write deviation.csv and manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Replace the configured outlier model.
        #[arg(long, value_enum)]
        scenario: Option<ScenarioKind>,
    },
    /// Run the operator and feature-map property checks.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a configuration file with every key set to its default.
    Config {
        /// Desk-scale setting (L = 20, 5000 steps, 10 trials) instead of full scale.
        #[arg(long)]
        scaled: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    AlphaStable,
    Sparse,
    None,
}

impl From<ScenarioKind> for OutlierModel {
    fn from(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::AlphaStable => OutlierModel::default_alpha_stable(),
            ScenarioKind::Sparse => OutlierModel::default_sparse(),
            ScenarioKind::None => OutlierModel::None,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            trials,
            seed,
            workers,
            scenario,
        } => {
            let mut cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            cfg.output_dir = out;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(kind) = scenario {
                cfg.scenario.outliers = kind.into();
            }
            cfg.validate()?;
            let result = run_experiment(&cfg, workers)?;
            let n = cfg.scenario.n_total;
            let tail = (n / 10).max(1);
            println!("final-window mean deviation (dB), last {tail} of {n} steps:");
            for (label, curve) in result.labels.iter().zip(&result.curves) {
                let mean = curve[n - tail..].iter().sum::<f64>() / tail as f64;
                println!("  {label:<12} {mean:>9.3}");
            }
            println!("wrote {}", cfg.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed } => {
            let outcomes = verify::run_all(seed)?;
            for o in &outcomes {
                println!("{o}");
            }
            Ok(if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Config { scaled } => {
            let cfg = if scaled {
                ExperimentConfig::scaled()
            } else {
                ExperimentConfig::default()
            };
            println!("{}", cfg.to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}
