use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use weakmeas::runner::{
    emit, parse_config, run_experiment, summarize, ExperimentConfig, OutputFormat,
};
use weakmeas::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weakmeas",
    version,
    about = "Weak measurement with post-selection: config-driven experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its result table.
    Run {
        config: PathBuf,
        /// Output file; defaults to output.path from the config, else stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Overrides sampling.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config and report every problem found.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    parse_config(&text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("ok: {} ({})", config.display(), cfg.experiment.name());
            Ok(())
        }
        Command::Run {
            config,
            output,
            format,
            seed,
        } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                match cfg.sampling.as_mut() {
                    Some(s) => s.seed = seed,
                    None => log::warn!(
                        "--seed ignored: experiment `{}` does not sample",
                        cfg.experiment.name()
                    ),
                }
            }
            let format = format.unwrap_or(cfg.output.format);
            let path = output.or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
            let table = run_experiment(&cfg)?;
            emit(&table, format, path.as_deref())?;
            eprint!("{}", summarize(&table));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
