// SPDX-License-Identifier: MIT

//! Named experiment suites and the registry that dispatches to them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use serde_json::{json, Value};

/// Parameters shared by all suites; each suite reads the ones it needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub beta: f64,
    pub levels: Option<RangeInclusive<usize>>,
    pub budget: Option<u64>,
    pub tol: Option<f64>,
    pub cases: Option<usize>,
    pub instance: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, beta: 0.0, levels: None, budget: None, tol: None, cases: None, instance: None }
    }
}

impl RunConfig {
    pub fn levels_or(&self, default: RangeInclusive<usize>) -> RangeInclusive<usize> {
        self.levels.clone().unwrap_or(default)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        qnet::Activation::leaky_relu(self.beta).context("--beta")?;
        if let Some(m) = self.budget {
            if m < 2 {
                bail!("--budget must be at least 2, got {m}");
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--tol must be positive, got {t}");
            }
        }
        if let Some(l) = &self.levels {
            if l.start() > l.end() {
                bail!("--levels range {}..{} is empty", l.start(), l.end());
            }
        }
        if let Some(p) = &self.instance {
            if !p.exists() {
                bail!("instance file {} does not exist", p.display());
            }
        }
        Ok(())
    }
}

/// A table of measurements; the `pass` column, when present, drives the exit status.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failures: usize,
    /// Suite-level facts for the manifest (aggregates, derived constants).
    pub summary: BTreeMap<String, Value>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), ..Table::default() }
    }

    /// Appends a row; `pass = false` counts as a failure.
    pub fn push(&mut self, mut cells: Vec<String>, pass: bool) {
        cells.push(pass.to_string());
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
        if !pass {
            self.failures += 1;
        }
    }

    /// Appends a plain measurement row.
    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    /// Records a suite-level check that is not a row.
    pub fn assert(&mut self, name: &str, pass: bool) {
        self.summary.insert(format!("check:{name}"), Value::Bool(pass));
        if !pass {
            self.failures += 1;
        }
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table>;
}

pub struct Registry {
    suites: BTreeMap<&'static str, Box<dyn Suite>>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.suites.keys()).finish()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { suites: BTreeMap::new() }
    }

    pub fn register(mut self, suite: impl Suite + 'static) -> Self {
        let name = suite.name();
        assert!(self.suites.insert(name, Box::new(suite)).is_none(), "suite {name} registered twice");
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.suites.keys().copied()
    }
}

/// Registry with every built-in suite.
pub fn registry() -> Registry {
    use crate::suites::*;
    Registry::empty()
        .register(algebra::AlgebraSuite)
        .register(maxnet::MaxnetSuite)
        .register(stability::StabilitySuite)
        .register(mlfp_equiv::MlfpEquivSuite)
        .register(size_report::SizeReportSuite)
        .register(converge::ConvergeSuite)
}

/// Writes `<name>.csv` and `<name>.manifest.json` into `out`; returns the CSV path.
pub fn write_outputs(name: &str, cfg: &RunConfig, table: &Table, out: &Path) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let csv_path = out.join(format!("{name}.csv"));
    std::fs::write(&csv_path, table.to_csv()?).with_context(|| format!("writing {}", csv_path.display()))?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": stamp,
        "config": {
            "seed": cfg.seed,
            "beta": cfg.beta,
            "levels": cfg.levels.as_ref().map(|l| format!("{}..{}", l.start(), l.end())),
            "budget": cfg.budget,
            "tol": cfg.tol,
            "cases": cfg.cases,
            "instance": cfg.instance.as_ref().map(|p| p.display().to_string()),
        },
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        "rows": table.rows.len(),
        "failures": table.failures,
        "summary": table.summary,
    });
    let man_path = out.join(format!("{name}.manifest.json"));
    std::fs::write(&man_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", man_path.display()))?;
    Ok(csv_path)
}

/// Shortest round-trip decimal form, so CSV bodies are reproducible.
pub fn fmt_f(v: f64) -> String {
    format!("{v}")
}
