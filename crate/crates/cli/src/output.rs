use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{RunConfig, Subcommand};
use crate::error::{CliError, CliResult};

/// A result file held in memory until the whole run has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl OutputFile {
    pub fn text(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents: contents.into_bytes(),
        }
    }

    pub fn json<T: Serialize>(name: &str, value: &T) -> CliResult<Self> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Validation(format!("serialising {name}: {e}")))?;
        text.push('\n');
        Ok(Self::text(name, text))
    }
}

/// Rows of text cells under a header; rendered as CSV with `\n` endings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &str) -> Self {
        Self {
            header: header.split(',').map(str::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Record of one run, written as `manifest.json`. Holds no timestamps or
/// host details, so it is reproducible like every other output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub subcommand: Subcommand,
    pub seed: u64,
    /// False when the subcommand is deterministic and ignores the seed.
    pub seed_used: bool,
    /// Every parameter the subcommand read, defaults included.
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(
        config: &RunConfig,
        seed_used: bool,
        parameters: BTreeMap<String, String>,
        files: &[OutputFile],
    ) -> Self {
        Self {
            program: "currentalg",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: config.subcommand,
            seed: config.seed,
            seed_used,
            parameters,
            outputs: files.iter().map(|f| f.name.clone()).collect(),
        }
    }
}

/// Writes `contents` to `dir/name` through a temporary file in `dir`
/// followed by a rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> CliResult<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::io(format!("creating temp file in {}", dir.display()), e))?;
    tmp.write_all(contents)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("writing {}", target.display()), e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(format!("renaming into {}", target.display()), e.error))?;
    Ok(())
}

pub fn write_all(dir: &Path, files: &[OutputFile]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    for f in files {
        write_atomic(dir, &f.name, &f.contents)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn csv_render() {
        let mut t = CsvTable::new("a,b");
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.render(), "a,b\n1,x\n");
        assert_eq!(t.column("b"), Some(1));
    }
}
