use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sdqsim::{list_presets, load_config, preset, run_experiment, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "sdqsim", version, about = "Superconducting-diode cQED simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML run file.
    Run {
        config: PathBuf,
        /// Output directory (defaults to the file's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the built-in figure presets.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset's run file instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List the built-in presets.
    ListPresets,
    /// Parse and validate a run file without running it.
    Validate { config: PathBuf },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SDQSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| CliError::validation(format!("SDQSIM_THREADS must be a positive integer (got '{v}')")))?;
    if n == 0 {
        return Err(CliError::validation("SDQSIM_THREADS must be a positive integer (got '0')"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn execute(cfg: &RunConfig, out: Option<PathBuf>) -> Result<(), CliError> {
    let m = run_experiment(cfg, out.as_deref())?;
    for f in &m.files {
        println!("{}  {}", f.sha256, f.name);
    }
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            init_threads()?;
            execute(&load_config(&config)?, out)
        }
        Command::Preset { name, out, print } => {
            let cfg = preset(&name)?;
            if print {
                print!("{}", sdqsim::presets::preset_source(&name).unwrap_or_default());
                return Ok(());
            }
            init_threads()?;
            execute(&cfg, out)
        }
        Command::ListPresets => {
            for p in list_presets() {
                println!("{p}");
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!("ok: {} ({})", config.display(), cfg.experiment.name());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
