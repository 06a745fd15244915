//! `nnoma`: run outage experiments from a config file or a figure preset and
//! write the results as CSV.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnoma_core::experiment::{
    emit_csv, figure_preset, load_config, run_experiment, ConfigError, ExperimentConfig, PRESET_NAMES,
};

#[derive(Parser)]
#[command(name = "nnoma", version, about = "Network-NOMA outage simulator")]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Simulate {
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the built-in config of one evaluation figure (fig2 .. fig9).
    Preset {
        name: String,
        /// Print the preset as a config file instead of running it.
        #[arg(long)]
        dump_config: bool,
        /// Output CSV path.
        #[arg(long, required_unless_present = "dump_config")]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Config(ConfigError),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn apply_overrides(config: &mut ExperimentConfig, run: &RunArgs) -> Result<(), ConfigError> {
    if let Some(t) = run.trials {
        config.trials = t;
    }
    if let Some(s) = run.seed {
        config.seed = s;
    }
    if run.threads == Some(0) {
        return Err(ConfigError::Invalid { field: "threads".into(), message: "must be at least 1".into() });
    }
    config.validate()
}

fn execute(mut config: ExperimentConfig, out: &Path, run: &RunArgs) -> Result<(), Failure> {
    apply_overrides(&mut config, run)?;
    log::info!("{}", config.summary());
    let started = std::time::Instant::now();
    let rows = run_experiment(&config, run.threads)?;
    emit_csv(&rows, out).map_err(|e| Failure::Other(format!("cannot write {}: {e}", out.display())))?;
    log::info!("wrote {} rows to {} in {:.1} s", rows.len(), out.display(), started.elapsed().as_secs_f64());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, out, run } => execute(load_config(&config)?, &out, &run),
        Command::Preset { name, dump_config, out, run } => {
            let mut config = figure_preset(&name)?;
            if dump_config {
                apply_overrides(&mut config, &run)?;
                print!("{}", config.to_toml_string());
                return Ok(());
            }
            let out = out.expect("clap requires --out unless --dump-config");
            execute(config, &out, &run)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) if e.is_rejection() => {
            eprintln!("error: config rejected: {e}");
            if matches!(e, ConfigError::UnknownPreset(_)) {
                eprintln!("available presets: {}", PRESET_NAMES.join(", "));
            }
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
