use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mtmvcsf::cli::{cmd_evaluate, cmd_generate, cmd_noise_sweep, cmd_train};
use mtmvcsf::config::{ConfigFile, Overrides, RunConfig};
use mtmvcsf::eval::EvalMode;
use mtmvcsf::trainer::{Algorithm, Preset};
use mtmvcsf::{Error, Result};

/// Multi-task multi-view latent factor learning.
///
/// Flags override values from `--config`, which override preset defaults.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// Dataset directory; replaces the data section of the config.
    #[arg(long, conflicts_with = "preset")]
    data: Option<PathBuf>,
    /// Generate a synthetic dataset in memory.
    #[arg(long)]
    preset: Option<Preset>,
    /// `standard` or `an`.
    #[arg(long)]
    algorithm: Option<Algorithm>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset directory.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Fit one model and write its report, loss curve and latent features.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Include wall-clock phase timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Accuracy of both algorithms over label-noise fractions and seeds.
    NoiseSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Latent features against raw stacked views.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        max_iters: Option<usize>,
        /// `classify` or `cluster`.
        #[arg(long)]
        mode: Option<EvalMode>,
    },
}

fn resolve(common: &Common, mut flags: Overrides) -> Result<RunConfig> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    flags.seed = common.seed;
    flags.out = common.out.clone();
    RunConfig::resolve(file, &flags)
}

fn data_flags(d: &DataArgs, max_iters: Option<usize>) -> Overrides {
    Overrides {
        algorithm: d.algorithm,
        preset: d.preset,
        data: d.data.clone(),
        max_iters,
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Generate { common, preset } => {
            let cfg = resolve(
                &common,
                Overrides {
                    preset,
                    ..Default::default()
                },
            )?;
            cmd_generate(&cfg)
        }
        Command::Train {
            common,
            data,
            max_iters,
            timings,
        } => cmd_train(&resolve(&common, data_flags(&data, max_iters))?, timings),
        Command::NoiseSweep {
            common,
            data,
            max_iters,
        } => cmd_noise_sweep(&resolve(&common, data_flags(&data, max_iters))?),
        Command::Evaluate {
            common,
            data,
            max_iters,
            mode,
        } => {
            let mut flags = data_flags(&data, max_iters);
            flags.mode = mode;
            cmd_evaluate(&resolve(&common, flags)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        1
    } else {
        2
    }
}
