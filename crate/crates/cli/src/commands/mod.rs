use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::config::{ParamReader, RunConfig, Subcommand};
use crate::error::CliResult;
use crate::output::OutputFile;

mod bec;
mod functionals;
mod quiver;

/// Files produced by a subcommand and the parameters it resolved.
#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub seed_used: bool,
    pub parameters: BTreeMap<String, String>,
}

/// Runs the subcommand without touching the filesystem. Parameter
/// validation completes before any computation starts.
pub fn execute(config: &RunConfig) -> CliResult<CommandOutput> {
    let reader = ParamReader::new(&config.params, config.subcommand);
    let seed = config.seed;
    match config.subcommand {
        Subcommand::MlWeights => functionals::ml_weights(reader),
        Subcommand::FunctionalCheck => functionals::functional_check(reader, seed),
        Subcommand::SampleMeasure => functionals::sample_measure(reader, seed),
        Subcommand::GirardLimit => functionals::girard_limit(reader),
        Subcommand::GroundPotential => functionals::ground_potential(reader),
        Subcommand::BecCurve => bec::bec_curve(reader),
        Subcommand::QuiverAlgebra => quiver::quiver_algebra(reader),
        Subcommand::QuiverGround => quiver::quiver_ground(reader, seed),
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn complex_cells(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}
