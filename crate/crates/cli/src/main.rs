use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypcocycle_cli::config::{ExperimentKeys, SEED_ENV};
use hypcocycle_cli::{CliResult, Status, Tolerance};

/// Lyapunov spectra of linear cocycles over the genus-2 surface.
#[derive(Parser)]
#[command(name = "hypcocycle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Compare two spectrum CSV files exponent by exponent.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Combined standard errors allowed.
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
        /// Relative difference allowed.
        #[arg(long, default_value_t = 0.05)]
        relative: f64,
    },
    /// Run a named validation suite.
    Validate {
        /// geometry, cocycle, heat-kernel, semigroup, dynkin, circle, drift,
        /// uniformity, spectrum, regularity or conversion
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Print the Möbius coefficients of the surface generators.
    DumpSurface {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Same names as the `[experiment]` keys.
#[derive(Args)]
struct Flags {
    #[arg(long)]
    surface: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    n_dirs: Option<usize>,
    #[arg(long)]
    n_vectors: Option<usize>,
    #[arg(long)]
    reorth_every: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl From<Flags> for ExperimentKeys {
    fn from(f: Flags) -> Self {
        ExperimentKeys {
            surface: f.surface,
            method: f.method,
            horizon: f.horizon,
            step: f.step,
            n_paths: f.n_paths,
            n_dirs: f.n_dirs,
            n_vectors: f.n_vectors,
            reorth_every: f.reorth_every,
            seed: f.seed,
            workers: f.workers,
            output: f.output,
        }
    }
}

fn dispatch(command: Command) -> CliResult<Status> {
    let env_seed = std::env::var(SEED_ENV).ok();
    match command {
        Command::Run { config, flags } => hypcocycle_cli::run(&config, &flags.into(), env_seed.as_deref()),
        Command::Compare { a, b, sigmas, relative } => hypcocycle_cli::compare(&a, &b, Tolerance { sigmas, relative }),
        Command::Validate { suite, config, flags } => {
            if flags.method.is_some() {
                return Err(hypcocycle_cli::CliError::Usage("--method is not accepted by validate".into()));
            }
            hypcocycle_cli::validate(&suite, config.as_ref(), &flags.into(), env_seed.as_deref())
        }
        Command::DumpSurface { output } => hypcocycle_cli::dump_surface(output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
