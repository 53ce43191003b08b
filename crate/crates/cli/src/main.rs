//! Command-line front end for circulant rational covariance extension.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Ctx, Rendered};
use io::Failure;

#[derive(Parser)]
#[command(
    name = "circarma",
    version,
    about = "Circulant rational covariance extension"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input JSON: a file path, `-` for stdin, or an inline JSON object.
    #[arg(long, short, global = true, default_value = "-")]
    input: String,

    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, short, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for `simulate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Regularization weight for `cepstral-solve` and ARMA sweeps; overrides the input.
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Omit the timestamp so identical inputs give byte-identical output.
    #[arg(long, global = true)]
    reproducible: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Toeplitz positivity and discrete-cone membership of covariance data.
    Check {
        /// Include the dense banded circulant (subject to CIRCARMA_DENSE_CAP).
        #[arg(long)]
        dense: bool,
    },
    /// Solve the scalar dual for a given numerator.
    Solve,
    /// Joint covariance and cepstral matching.
    CepstralSolve,
    /// Solve the block dual with a scalar numerator.
    BlockSolve,
    /// Full periodic covariance sequence of the solved model.
    Extend,
    /// Bilateral and unilateral ARMA forms and the whitening factor.
    Factor,
    /// Sample paths by spectral sampling.
    Simulate,
    /// Approximation error against a ground-truth model over lists of N and n.
    Sweep,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let input = io::read_input(&cli.input)?;
    let ctx = Ctx {
        seed: cli.seed,
        lambda: cli.lambda,
        dense: matches!(cli.command, Command::Check { dense: true }),
    };
    let Rendered { mut json, csv } = match cli.command {
        Command::Check { .. } => commands::check(&input, &ctx)?,
        Command::Solve => commands::solve(&input, &ctx)?,
        Command::CepstralSolve => commands::cepstral_solve(&input, &ctx)?,
        Command::BlockSolve => commands::block_solve(&input, &ctx)?,
        Command::Extend => commands::extend(&input, &ctx)?,
        Command::Factor => commands::factor(&input, &ctx)?,
        Command::Simulate => commands::simulate_cmd(&input, &ctx)?,
        Command::Sweep => commands::sweep(&input, &ctx)?,
    };
    match cli.format {
        Format::Csv => csv.ok_or_else(|| Failure::usage("this command has no CSV form")),
        Format::Json => {
            if !cli.reproducible {
                let now = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs());
                json["timestamp"] = now.into();
            }
            Ok(io::to_json(&json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| io::emit(cli.output.as_deref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Domain { message, payload } => {
                    eprintln!("error: {message}");
                    // the diagnostic payload is the command result
                    let _ = io::emit(cli.output.as_deref(), &io::to_json(payload));
                }
            }
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
