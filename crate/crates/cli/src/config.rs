use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    MlWeights,
    FunctionalCheck,
    SampleMeasure,
    GirardLimit,
    BecCurve,
    QuiverAlgebra,
    QuiverGround,
    GroundPotential,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::MlWeights,
        Subcommand::FunctionalCheck,
        Subcommand::SampleMeasure,
        Subcommand::GirardLimit,
        Subcommand::BecCurve,
        Subcommand::QuiverAlgebra,
        Subcommand::QuiverGround,
        Subcommand::GroundPotential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::MlWeights => "ml-weights",
            Subcommand::FunctionalCheck => "functional-check",
            Subcommand::SampleMeasure => "sample-measure",
            Subcommand::GirardLimit => "girard-limit",
            Subcommand::BecCurve => "bec-curve",
            Subcommand::QuiverAlgebra => "quiver-algebra",
            Subcommand::QuiverGround => "quiver-ground",
            Subcommand::GroundPotential => "ground-potential",
        }
    }
}

impl FromStr for Subcommand {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|c| c.name()).collect();
            CliError::Validation(format!(
                "unknown subcommand `{s}` (expected one of {})",
                names.join(", ")
            ))
        })
    }
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub params: BTreeMap<String, String>,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "out";

/// `key=value` split on the first `=`, both sides trimmed.
pub fn split_pair(token: &str) -> CliResult<(String, String)> {
    let (k, v) = token
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("expected key=value, got `{token}`")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(CliError::Validation(format!("empty key in `{token}`")));
    }
    Ok((k.to_string(), v.to_string()))
}

/// Flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = split_pair(line).map_err(|e| CliError::Validation(format!("config line {}: {e}", i + 1)))?;
        if out.insert(k.clone(), v).is_some() {
            return Err(CliError::Validation(format!(
                "config line {}: `{k}` given twice",
                i + 1
            )));
        }
    }
    Ok(out)
}

/// Merges a config file with command-line values; the command line wins.
/// The keys `subcommand`, `seed` and `out` are reserved for the run itself.
pub fn resolve(
    file: Option<&Path>,
    subcommand: Option<&str>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    overrides: &[String],
) -> CliResult<RunConfig> {
    let mut params = match file {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    for token in overrides {
        let (k, v) = split_pair(token)?;
        params.insert(k, v);
    }
    let file_subcommand = params.remove("subcommand");
    let file_seed = params.remove("seed");
    let file_out = params.remove("out");
    let name = subcommand
        .map(str::to_string)
        .or(file_subcommand)
        .ok_or_else(|| CliError::Validation("no subcommand given".into()))?;
    let seed = match (seed, file_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| CliError::Validation(format!("seed `{s}` is not a 64-bit unsigned integer")))?,
        (None, None) => DEFAULT_SEED,
    };
    Ok(RunConfig {
        subcommand: name.parse()?,
        seed,
        out_dir: out
            .or(file_out.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        params,
    })
}

/// Typed access to the parameter map. Every key read is recorded with its
/// resolved value; [`ParamReader::finish`] rejects keys nobody read.
#[derive(Debug)]
pub struct ParamReader<'a> {
    raw: &'a BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
    read: BTreeSet<String>,
    command: &'static str,
}

impl<'a> ParamReader<'a> {
    pub fn new(raw: &'a BTreeMap<String, String>, command: Subcommand) -> Self {
        Self {
            raw,
            resolved: BTreeMap::new(),
            read: BTreeSet::new(),
            command: command.name(),
        }
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.read.insert(key.to_string());
        self.raw.get(key).map(String::as_str)
    }

    pub fn value<T: FromStr + Display>(&mut self, key: &str, default: T) -> CliResult<T> {
        let v = match self.take(key) {
            Some(text) => text
                .parse()
                .map_err(|_| CliError::Validation(format!("parameter `{key}`: cannot parse `{text}`")))?,
            None => default,
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> CliResult<f64> {
        let v: f64 = self.value(key, default)?;
        if !v.is_finite() {
            return Err(CliError::Validation(format!("parameter `{key}` must be finite")));
        }
        Ok(v)
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        let list = match self.take(key) {
            Some(text) => text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| CliError::Validation(format!("parameter `{key}`: bad entry `{s}`")))
                })
                .collect::<CliResult<Vec<_>>>()?,
            None => default.to_vec(),
        };
        if list.is_empty() {
            return Err(CliError::Validation(format!("parameter `{key}` is empty")));
        }
        self.resolved.insert(key.to_string(), join(&list));
        Ok(list)
    }

    pub fn string_list(&mut self, key: &str, default: &str) -> Vec<String> {
        let text = self.take(key).unwrap_or(default);
        self.resolved.insert(key.to_string(), text.to_string());
        text.split(',').map(|s| s.trim().to_string()).collect()
    }

    pub fn choice(&mut self, key: &str, default: &'static str, allowed: &[&'static str]) -> CliResult<&'static str> {
        let text = self.take(key).unwrap_or(default);
        let v = allowed.iter().copied().find(|a| *a == text).ok_or_else(|| {
            CliError::Validation(format!(
                "parameter `{key}` = `{text}`; expected one of {}",
                allowed.join(", ")
            ))
        })?;
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Errors on unread keys; otherwise returns the resolved parameters.
    pub fn finish(self) -> CliResult<BTreeMap<String, String>> {
        let unknown: Vec<&str> = self
            .raw
            .keys()
            .filter(|k| !self.read.contains(*k))
            .map(String::as_str)
            .collect();
        if !unknown.is_empty() {
            let accepted: Vec<&str> = self.read.iter().map(String::as_str).collect();
            return Err(CliError::Validation(format!(
                "unknown parameter(s) {} for {} (accepted here: {})",
                unknown.join(", "),
                self.command,
                accepted.join(", ")
            )));
        }
        Ok(self.resolved)
    }
}

pub fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
