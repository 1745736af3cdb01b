//! Structured reports: JSON with a schema version, plus CSV tables.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::CampaignConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// How a measured value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtMost,
    Below,
    Equal,
}

impl Comparison {
    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => measured <= threshold,
            Comparison::Below => measured < threshold,
            Comparison::Equal => measured == threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Spec label, or empty for spec-independent checks.
    pub subject: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// The property this check certifies.
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub parallel: bool,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            parallel: cfg!(feature = "parallel"),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub config: CampaignConfig,
    pub checks: Vec<CheckRecord>,
    pub warnings: Vec<String>,
    pub pass: bool,
    pub environment: Environment,
}

impl Report {
    pub fn new(command: &str, config: &CampaignConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed: config.seed,
            config: config.clone(),
            checks: Vec::new(),
            warnings: Vec::new(),
            pass: true,
            environment: Environment::current(),
        }
    }

    pub fn check(&mut self, name: &str, subject: &str, measured: f64, threshold: f64, cmp: Comparison, provenance: &str) {
        // Non-finite values would not survive JSON, and never pass.
        let (measured, pass) = if measured.is_finite() { (measured, cmp.holds(measured, threshold)) } else { (f64::MAX, false) };
        self.pass &= pass;
        self.checks.push(CheckRecord {
            name: name.into(),
            subject: subject.into(),
            measured,
            threshold,
            comparison: cmp,
            pass,
            provenance: provenance.into(),
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    /// Write `report.json` and `tables/<command>.csv` under `out`.
    pub fn write(&self, out: &Path) -> Result<(), CliError> {
        fs::create_dir_all(out.join("tables"))?;
        let json = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(out.join("report.json"), json + "\n")?;
        let mut w = csv::Writer::from_path(out.join("tables").join(format!("{}.csv", self.command)))
            .map_err(|e| CliError::Io(e.to_string()))?;
        for c in &self.checks {
            w.serialize(CsvRow {
                name: &c.name,
                subject: &c.subject,
                measured: c.measured,
                threshold: c.threshold,
                pass: c.pass,
            })
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let subject = if c.subject.is_empty() { String::new() } else { format!(" {}", c.subject) };
            s.push_str(&format!(
                "{} {}{}: {:.3e} (threshold {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                subject,
                c.measured,
                c.threshold
            ));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        s.push_str(&format!("{}: {passed}/{} checks pass\n", self.command, self.checks.len()));
        s
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    subject: &'a str,
    measured: f64,
    threshold: f64,
    pass: bool,
}

/// Write arbitrary serializable rows to `tables/<name>.csv`.
pub fn write_table<T: Serialize>(out: &Path, name: &str, rows: &[T]) -> Result<(), CliError> {
    fs::create_dir_all(out.join("tables"))?;
    let mut w = csv::Writer::from_path(out.join("tables").join(format!("{name}.csv"))).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_fails_the_report() {
        let mut r = Report::new("test", &CampaignConfig::default());
        r.check("a", "", 1.0, 2.0, Comparison::AtMost, "x");
        assert!(r.pass);
        r.check("b", "", 3.0, 2.0, Comparison::AtMost, "x");
        assert!(!r.pass);
        assert!(r.summary().contains("1/2 checks pass"));
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("test", &CampaignConfig::default());
        r.check("a", "H", 1.0, 1.0, Comparison::Equal, "x");
        let back: Report = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
