//! CSV tables and run manifests.

use anyhow::Context;
use qprenorm_core::RenormConfig;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Cell formatting with 17 significant digits and no locale.
pub fn num(x: f64) -> String {
    // adding zero folds -0 into 0
    format!("{:.16e}", x + 0.0)
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RenormConfig,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    pub versions: String,
}

/// Collects the files written by one run and writes `<command>.manifest.json`.
pub struct Run {
    dir: PathBuf,
    command: String,
    config: RenormConfig,
    outputs: Vec<String>,
    start: Instant,
}

impl Run {
    pub fn new(dir: &Path, command: &str, config: &RenormConfig) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config: config.clone(),
            outputs: Vec::new(),
            start: Instant::now(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.path(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.record(name);
        Ok(())
    }

    pub fn table(&mut self, name: &str, t: &Table) -> anyhow::Result<()> {
        self.write(name, &t.text)
    }

    /// Note a file written by other means.
    pub fn record(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn finish(self) -> anyhow::Result<()> {
        let name = format!("{}.manifest.json", self.command);
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            outputs: self.outputs,
            wall_time: self.start.elapsed().as_secs_f64(),
            versions: format!("qprenorm {}", env!("CARGO_PKG_VERSION")),
        };
        let path = self.dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}
