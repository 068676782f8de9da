//! Experiment reports: keyed statistic rows plus declared pass/fail checks,
//! serializable to JSON and CSV. Row ordering and map ordering are fixed so
//! two identical runs produce byte-identical artifacts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::Result;

/// One statistics row, keyed (e.g. by h or by level).
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub key: String,
    /// Sample count behind the row (0 for deterministic rows).
    pub count: u64,
    /// Seed used for the row (0 for deterministic rows).
    pub seed: u64,
    pub values: BTreeMap<String, f64>,
}

impl Row {
    pub fn new(key: impl Into<String>) -> Self {
        Row {
            key: key.into(),
            count: 0,
            seed: 0,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn counted(mut self, count: u64, seed: u64) -> Self {
        self.count = count;
        self.seed = seed;
        self
    }
}

/// A named acceptance check evaluated by the experiment itself.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// "<=" or ">=".
    pub relation: String,
    pub passed: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            relation: "<=".into(),
            passed: value <= threshold,
        }
    }

    pub fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            relation: ">=".into(),
            passed: value >= threshold,
        }
    }
}

/// Full experiment output.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub flags: Vec<String>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: serde_json::Value, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            seed,
            rows: Vec::new(),
            checks: Vec::new(),
            passed: true,
            flags: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn push_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn push_check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with a leading comment line documenting the columns. Column set
    /// is the sorted union over rows; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.rows {
            for k in r.values.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols.sort();
        let mut s = format!(
            "# experiment: {}; columns: key,count,seed,{}\n",
            self.experiment,
            cols.join(",")
        );
        s.push_str(&format!("key,count,seed,{}\n", cols.join(",")));
        for r in &self.rows {
            s.push_str(&format!("{},{},{}", r.key, r.count, r.seed));
            for c in &cols {
                match r.values.get(c) {
                    Some(v) => s.push_str(&format!(",{v}")),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join(format!("{}.json", self.experiment)))?;
        f.write_all(self.to_json().as_bytes())?;
        let mut f = std::fs::File::create(dir.join(format!("{}.csv", self.experiment)))?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    /// Summary lines: one per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "[{}] {}: {} {} {} -> {}\n",
                self.experiment,
                c.name,
                c.value,
                c.relation,
                c.threshold,
                if c.passed { "pass" } else { "FAIL" }
            ));
        }
        s
    }
}
