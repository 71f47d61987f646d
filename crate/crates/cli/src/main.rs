//! `dgbv`: validate DGBV instances, solve Maurer-Cartan equations and check
//! the resulting formal Frobenius potentials.
//!
//! Exit codes: 0 pass, 1 mathematical failure (report on stdout), 2 input error.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dgbv_core::homology::Differential;

use crate::commands::path_arg;
use crate::report::{CliResult, Report};

#[derive(Parser)]
#[command(name = "dgbv", version, about = "Exact DGBV algebra and Frobenius potential toolkit")]
struct Cli {
    /// Plain-text report instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Delta,
    Bv,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms, the integral and the finiteness/niceness conditions.
    Validate {
        /// Instance file; `-` or omitted reads stdin.
        file: Option<PathBuf>,
    },
    /// Betti numbers and representatives.
    Cohomology {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "delta")]
        operator: Operator,
    },
    /// Normalized Maurer-Cartan solution, or the obstruction.
    Solve {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        order: u32,
        /// Continue past failed axioms or conditions.
        #[arg(long)]
        force: bool,
    },
    /// The potential Φ truncated at the given order.
    Potential {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long)]
        force: bool,
    },
    /// WDVV, identity axiom and cubic identity on the potential.
    Wdvv {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random tangent vectors for the cubic identity.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        force: bool,
    },
    /// Φ invariance under seeded random gauge transformations.
    GaugeTest {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        force: bool,
    },
    /// Emit an instance file from a geometric model.
    Build {
        #[command(subcommand)]
        model: Model,
    },
    /// Morphism checks and potential comparison between two instances.
    Compare {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long, default_value_t = 6)]
        order: u32,
    },
}

#[derive(Subcommand)]
enum Model {
    /// Constant forms on the n-torus.
    Torus {
        #[arg(long)]
        dim: usize,
        /// Constant bivector, e.g. `1^2:1,3^4:-1/2` (indices from 1).
        #[arg(long)]
        poisson: Option<String>,
    },
}

enum Output {
    Report(Report),
    Text(String),
}

fn run(cli: &Cli) -> CliResult<Output> {
    use Command::*;
    let report = match &cli.command {
        Validate { file } => commands::validate(path_arg(file))?,
        Cohomology { file, operator } => {
            let which = match operator {
                Operator::Delta => Differential::Delta,
                Operator::Bv => Differential::Bv,
            };
            commands::cohomology_cmd(path_arg(file), which)?
        }
        Solve { file, order, force } => commands::solve(path_arg(file), *order, *force)?,
        Potential { file, order, force } => commands::potential_cmd(path_arg(file), *order, *force)?,
        Wdvv { file, order, seed, trials, force } => {
            commands::wdvv(path_arg(file), *order, *seed, *trials, *force)?
        }
        GaugeTest { file, order, seed, trials, force } => {
            commands::gauge_test(path_arg(file), *order, *seed, *trials, *force)?
        }
        Build { model: Model::Torus { dim, poisson } } => {
            return Ok(Output::Text(commands::build_torus(*dim, poisson.as_deref())?));
        }
        Compare { source, target, morphism, order } => commands::compare(source, target, morphism, *order)?,
    };
    Ok(Output::Report(report))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Cohomology { .. } => "cohomology",
        Command::Solve { .. } => "solve",
        Command::Potential { .. } => "potential",
        Command::Wdvv { .. } => "wdvv",
        Command::GaugeTest { .. } => "gauge-test",
        Command::Build { .. } => "build",
        Command::Compare { .. } => "compare",
    }
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Output::Text(s)) => {
            emit(&s);
            ExitCode::SUCCESS
        }
        Ok(Output::Report(r)) => {
            emit(&r.render(cli.human));
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) if e.is_input() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            let mut r = Report::new(command_name(&cli.command));
            r.fail();
            r.set("error", e.to_string());
            r.line(e.to_string());
            emit(&r.render(cli.human));
            ExitCode::from(1)
        }
    }
}
