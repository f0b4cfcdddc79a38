use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use currentalg_cli::{resolve, run, CliError};

/// Numerical checks for boson-gas functionals, superposed Bose-Einstein
/// thermodynamics and a hole-pairing lattice model.
#[derive(Debug, Parser)]
#[command(
    name = "currentalg",
    version,
    after_help = "Subcommands: ml-weights, functional-check, sample-measure, girard-limit, bec-curve, \
                  quiver-algebra, quiver-ground, ground-potential.\n\
                  Parameters are key=value pairs; see the README for each subcommand's keys."
)]
struct Cli {
    /// Flat key=value file; command-line values override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (default: out).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// The subcommand followed by key=value parameters.
    #[arg(value_name = "SUBCOMMAND | KEY=VALUE")]
    args: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| {
        let (pairs, names): (Vec<String>, Vec<String>) = cli.args.into_iter().partition(|a| a.contains('='));
        if names.len() > 1 {
            return Err(CliError::Validation(format!(
                "more than one subcommand given: {}",
                names.join(" ")
            )));
        }
        let config = resolve(
            cli.config.as_deref(),
            names.first().map(String::as_str),
            cli.seed,
            cli.out,
            &pairs,
        )?;
        run(&config)
    })();
    match outcome {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
