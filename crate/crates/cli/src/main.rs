use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evsim_cli::config::{parse_config, Format, RunConfig};
use evsim_cli::run::{render, run_experiment, Experiment};
use evsim_cli::CliError;

/// Tunneling-time experiments on inhomogeneous dielectric barriers.
#[derive(Debug, Parser)]
#[command(name = "evsim", version)]
struct Cli {
    /// TOML run configuration; defaults to the quadratic model a = 0.1, d = 1.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (overrides [output] dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Table format (overrides [output] format).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write an SVG plot.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tunneling time from the energy-transport velocity.
    Tau,
    /// Matched three-region packet fields on an (x, t) grid.
    Simulate,
    /// FDTD transit time across the barrier.
    Fdtd,
    /// Quarter-wave stack spectrum, band gap and group delay.
    Spectrum,
    /// Exact Kemmer algebra and bilinear checks.
    KemmerVerify {
        /// Also write the matrices as JSON.
        #[arg(long)]
        dump_matrices: bool,
    },
    /// WKB substitution residuals against frequency.
    WkbCheck,
}

impl Command {
    fn experiment(&self) -> Experiment {
        match *self {
            Command::Tau => Experiment::Tau,
            Command::Simulate => Experiment::Simulate,
            Command::Fdtd => Experiment::Fdtd,
            Command::Spectrum => Experiment::Spectrum,
            Command::KemmerVerify { dump_matrices } => Experiment::KemmerVerify { dump_matrices },
            Command::WkbCheck => Experiment::WkbCheck,
        }
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var("EVSIM_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("ignoring EVSIM_THREADS={value:?}: expected a positive integer"),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(path.display().to_string(), e))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out_dir {
        config.output.dir = dir.display().to_string();
    }
    if let Some(format) = cli.format {
        config.output.format = format;
    }
    config.output.svg |= cli.svg;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let outcome = run_experiment(cli.command.experiment(), &config)?;
    let dir = Path::new(&config.output.dir);
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    for artifact in render(&outcome, &config) {
        let path = dir.join(&artifact.file);
        std::fs::write(&path, artifact.contents)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        println!("wrote {}", path.display());
    }
    for line in &outcome.report {
        println!("{line}");
    }
    match outcome.failure {
        Some(message) => Err(CliError::Verification(message)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
