//! Batch driver: resolves a [`RunConfig`], runs one subcommand and writes
//! its CSV/JSON/SVG outputs plus a `manifest.json` into the output
//! directory. Outputs are a pure function of the configuration and seed.

pub mod config;
pub mod error;
pub mod output;
pub mod svg;

mod commands;

pub use commands::{execute, CommandOutput};
pub use config::{resolve, RunConfig, Subcommand};
pub use error::{CliError, CliResult};
pub use output::Manifest;

/// Executes the run and writes every output, the manifest last. Nothing is
/// written if validation or computation fails.
pub fn run(config: &RunConfig) -> CliResult<Manifest> {
    let CommandOutput {
        mut files,
        seed_used,
        parameters,
    } = execute(config)?;
    let manifest = Manifest::new(config, seed_used, parameters, &files);
    files.push(output::OutputFile::json("manifest.json", &manifest)?);
    output::write_all(&config.out_dir, &files)?;
    Ok(manifest)
}
