mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use tropical_ca::ca::Fault;
use tropical_ca::semiring::{Rational, Real, Scalar};

use commands::{Outputs, RunContext, Schedule};
use config::{parse_range, Experiment, ExperimentConfig, Mode, Overrides};

/// Max-plus timed cellular automata experiments.
#[derive(Parser, Debug)]
#[command(name = "tropical-ca", version)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Arithmetic for timing values.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Seed for generated timing parameters.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Range for generated processing times, `LO,HI`.
    #[arg(long, global = true, value_parser = parse_range)]
    xi_range: Option<(i64, i64)>,
    /// Range for generated transmission times, `LO,HI`.
    #[arg(long, global = true, value_parser = parse_range)]
    tau_range: Option<(i64, i64)>,
    /// Use the parallel paths where available.
    #[arg(long, global = true)]
    parallel: bool,
    /// Make cell CELL (1-based) update early; negative control.
    #[arg(long, global = true, hide = true, value_name = "CELL")]
    inject_fault: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Eigenvalue, cyclicity and critical graph of P.
    Analyze,
    /// Trajectory, regime and contour plot.
    Simulate,
    /// Run the CA synchronously, on the max-plus schedule, or both.
    Ca {
        #[arg(value_enum, default_value = "both")]
        schedule: Schedule,
    },
    /// State transition graph and attractor census.
    Stg,
    /// Check the eigen-equation, the regime and the sync/async bijection.
    Verify,
    /// Write every plot for the configured experiment.
    Render,
}

enum Failure {
    Config(anyhow::Error),
    Verification(Vec<String>),
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    use tropical_ca::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Internal(_)) | Some(E::RegimeCapExceeded { .. }) => 1,
        _ => 2,
    }
}

fn dispatch<T: Scalar>(cmd: Command, cx: &RunContext) -> Result<Outputs> {
    match cmd {
        Command::Analyze => commands::analyze::<T>(cx),
        Command::Simulate => commands::simulate::<T>(cx),
        Command::Ca { schedule } => commands::ca::<T>(cx, schedule),
        Command::Stg => commands::stg(cx),
        Command::Verify => commands::verify::<T>(cx),
        Command::Render => commands::render::<T>(cx),
    }
}

fn run(cli: Cli) -> Result<(), (Failure, u8)> {
    let config = (|| -> Result<Experiment> {
        let cfg = match &cli.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let exp = Experiment::resolve(
            cfg,
            Overrides {
                out: cli.out.clone(),
                mode: cli.mode,
                seed: cli.seed,
                xi_range: cli.xi_range,
                tau_range: cli.tau_range,
            },
        )?;
        if let Some(cell) = cli.inject_fault {
            anyhow::ensure!(
                (1..=exp.spec.size()).contains(&cell),
                "--inject-fault cell must lie in 1..={}",
                exp.spec.size()
            );
        }
        Ok(exp)
    })()
    .map_err(|e| (Failure::Config(e), 2))?;
    log::info!(
        "mode {}, {} cells, rule {}",
        config.mode.name(),
        config.spec.size(),
        config.rule
    );

    let cx = RunContext {
        exp: &config,
        parallel: cli.parallel,
        fault: cli
            .inject_fault
            .map_or(Fault::None, |cell| Fault::EarlyUpdate { cell: cell - 1 }),
    };
    let outputs = match config.mode {
        Mode::Int => dispatch::<i64>(cli.command, &cx),
        Mode::Rational => dispatch::<Rational>(cli.command, &cx),
        Mode::Float => dispatch::<Real>(cli.command, &cx),
    }
    .map_err(|e| {
        let code = exit_code_for(&e);
        (Failure::Config(e), code)
    })?;
    outputs
        .write(&config.out)
        .map_err(|e| (Failure::Config(e), 2))?;
    if outputs.failures.is_empty() {
        Ok(())
    } else {
        Err((Failure::Verification(outputs.failures), 1))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TROPICAL_CA_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((Failure::Config(e), code)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
        Err((Failure::Verification(names), code)) => {
            eprintln!("verification failed: {}", names.join(", "));
            ExitCode::from(code)
        }
    }
}
