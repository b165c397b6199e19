//! Check results, CSV tables and the run manifest.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::ExperimentConfig;

/// One named check of a suite and its table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// File stem of the table.
    pub name: String,
    /// The statement being checked, written as the first line of the table.
    pub statement: String,
    /// Gating checks (exact statements and configured ceilings) decide the
    /// exit status; the rest only report.
    pub gating: bool,
    pub pass: bool,
    pub summary: String,
    /// Ceiling key and the largest value of the tracked constant.
    pub tracked: Option<(String, f64)>,
    #[serde(skip)]
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
}

impl Check {
    pub fn new(name: &str, statement: &str, gating: bool, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            gating,
            tracked: None,
            pass: true,
            summary: String::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn fail_if(&mut self, failed: bool) {
        if failed {
            self.pass = false;
        }
    }

    /// The CSV body: a `#` line with the statement, the column names, rows.
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut out = Vec::new();
        writeln!(out, "# {}", self.statement).expect("in-memory write");
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out).expect("utf-8"))
    }
}

/// Shortest round-trip formatting, so tables are byte-stable.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub suite: &'a str,
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub version: &'static str,
    pub started_unix_s: u64,
    pub elapsed_s: f64,
    pub threads: usize,
    pub checks: &'a [Check],
    pub pass: bool,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes one CSV per check and `manifest.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    suite: &str,
    cfg: &ExperimentConfig,
    checks: &[Check],
    started: u64,
    elapsed: Duration,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for c in checks {
        let body = c.to_csv().map_err(std::io::Error::other)?;
        fs::write(dir.join(format!("{}.csv", c.name)), body)?;
    }
    let manifest = Manifest {
        suite,
        config: cfg,
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION"),
        started_unix_s: started,
        elapsed_s: elapsed.as_secs_f64(),
        threads: rayon::current_num_threads(),
        checks,
        pass: checks.iter().all(|c| !c.gating || c.pass),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    fs::write(dir.join("manifest.json"), json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Check::new("demo", "a <= b", true, &["i", "value"]);
        c.row(vec!["0".into(), num(0.1)]);
        assert_eq!(c.to_csv().unwrap(), "# a <= b\ni,value\n0,0.1\n");
    }
}
