//! Covariant phase-space measurement toolkit for finite Abelian groups,
//! with a truncated-Fock oscillator analogue.
//!
//! Exit codes: 0 pass, 1 invariant failure, 2 config error,
//! 3 reconstruction impossible, 4 CV regime error.

mod commands;
mod config;
mod jsonout;

use clap::{Parser, Subcommand};
use commands::{CliError, CommandOutput};
use config::Experiment;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "weylmeas",
    version,
    about = "Covariant phase-space measurements on finite Abelian groups"
)]
struct Cli {
    /// JSON config file; explicit flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Group moduli, e.g. "3,2" for Z_3 x Z_2
    #[arg(long, global = true)]
    group: Option<String>,

    /// Fiducial vector: delta0 | uniform | JSON array
    #[arg(long, global = true)]
    fiducial: Option<String>,

    /// State: plus | maximally_mixed | vacuum | fock:<n> | JSON vector or matrix
    #[arg(long, global = true)]
    state: Option<String>,

    /// Seed for the randomized suites
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance override name=value; repeatable
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites against a group and fiducial
    Verify,
    /// Measurement density, probabilities, and entropies of a state
    Measure,
    /// Complementarity deviations of the measurement and ensemble channels
    /// for one pure input state
    Complementarity,
    /// Reconstruct a state from covariant measurement probabilities
    Reconstruct {
        /// Probabilities file: a measure report or a bare JSON array
        #[arg(long)]
        probabilities: PathBuf,
    },
    /// Truncated-Fock oscillator reports
    Cv {
        #[command(subcommand)]
        command: CvCommand,
    },
    /// Dump Weyl operators or POVM effects as JSON matrices
    Dump {
        /// What to dump: weyl | povm
        #[arg(long, default_value = "weyl")]
        what: String,
    },
}

#[derive(Subcommand)]
enum CvCommand {
    /// Husimi function on a node-centered square grid, as CSV
    HusimiGrid {
        /// Truncation dimension
        #[arg(long)]
        dim: Option<usize>,
        /// Grid half-width
        #[arg(long)]
        radius: Option<f64>,
        /// Grid step
        #[arg(long)]
        step: Option<f64>,
    },
    /// Midpoint-quadrature check of the coherent resolution of identity
    ResolutionCheck {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Top-left comparison block size
        #[arg(long)]
        block: Option<usize>,
    },
    /// Scalar phase relating exp(ixq) exp(iyp) to the displacement D(alpha)
    PhaseCheck {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        block: Option<usize>,
    },
}

fn build_experiment(cli: &Cli) -> Result<Experiment, CliError> {
    let mut exp = match &cli.config {
        Some(path) => config::load_config_file(path)?,
        None => Experiment::default(),
    };
    if let Some(group) = &cli.group {
        exp.moduli = Some(config::parse_moduli(group)?);
    }
    if let Some(fiducial) = &cli.fiducial {
        exp.fiducial = Some(config::parse_state_name(fiducial, "fiducial")?);
    }
    if let Some(state) = &cli.state {
        exp.state = Some(config::parse_state_name(state, "state")?);
    }
    if let Some(seed) = cli.seed {
        exp.seed = Some(seed);
    }
    for tol in &cli.tol {
        exp.tolerance_overrides
            .push(config::parse_tolerance_override(tol)?);
    }

    // cv flags overlay the cv section of the config file
    if let Command::Cv { command } = &cli.command {
        match command {
            CvCommand::HusimiGrid { dim, radius, step } => {
                exp.cv_dim = dim.or(exp.cv_dim);
                exp.cv_radius = radius.or(exp.cv_radius);
                exp.cv_step = step.or(exp.cv_step);
            }
            CvCommand::ResolutionCheck {
                dim,
                radius,
                step,
                block,
            } => {
                exp.cv_dim = dim.or(exp.cv_dim);
                exp.cv_radius = radius.or(exp.cv_radius);
                exp.cv_step = step.or(exp.cv_step);
                exp.cv_block = block.or(exp.cv_block);
            }
            CvCommand::PhaseCheck { x, y, dim, block } => {
                exp.cv_x = x.or(exp.cv_x);
                exp.cv_y = y.or(exp.cv_y);
                exp.cv_dim = dim.or(exp.cv_dim);
                exp.cv_block = block.or(exp.cv_block);
            }
        }
    }
    Ok(exp)
}

fn dispatch(cli: &Cli, exp: &Experiment) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Verify => commands::cmd_verify(exp),
        Command::Measure => commands::cmd_measure(exp),
        Command::Complementarity => commands::cmd_complementarity(exp),
        Command::Reconstruct { probabilities } => commands::cmd_reconstruct(exp, probabilities),
        Command::Cv { command } => match command {
            CvCommand::HusimiGrid { .. } => commands::cmd_cv_husimi_grid(exp),
            CvCommand::ResolutionCheck { .. } => commands::cmd_cv_resolution_check(exp),
            CvCommand::PhaseCheck { .. } => commands::cmd_cv_phase_check(exp),
        },
        Command::Dump { what } => commands::cmd_dump(exp, what),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    let exp = match build_experiment(&cli) {
        Ok(exp) => exp,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    match dispatch(&cli, &exp) {
        Ok(CommandOutput { text, exit }) => {
            if let Err(e) = emit(&cli.out, &text) {
                eprintln!("error: {}", e.message());
                return e.exit_code();
            }
            exit
        }
        Err(CliError::Reconstruction { message, report }) => {
            // the structured report still goes to the requested sink
            let _ = emit(&cli.out, &report);
            eprintln!("error: {message}");
            3
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run());
}
