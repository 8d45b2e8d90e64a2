//! Run directories: manifest, CSV tables, reports, summaries and figures.

use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use tfts::acceptance::Tolerances;
use tfts::report::ExperimentReport;

/// The fully resolved configuration of one run.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub mc_paths: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub args: Vec<String>,
    pub config: RunConfig,
    pub files: Vec<String>,
    pub pass: bool,
    pub failures: Vec<String>,
    pub runtime_seconds: f64,
}

/// 17 significant digits, locale independent.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct RunDir {
    pub dir: PathBuf,
    files: Vec<String>,
    summary: String,
    failures: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path, name: &str) -> Result<Self> {
        let dir = root.join(name);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(RunDir { dir, files: Vec::new(), summary: String::new(), failures: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// A numeric table; every cell is written with 17 significant digits.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(|v| num(*v)))?;
        }
        let text = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
        self.write(name, &text)
    }

    /// `<stem>.csv` and `<stem>.json`, plus summary lines and failure bookkeeping.
    pub fn report(&mut self, stem: &str, rep: &ExperimentReport) -> Result<()> {
        self.write(&format!("{stem}.csv"), &rep.to_csv())?;
        self.write(&format!("{stem}.json"), &serde_json::to_string_pretty(rep)?)?;
        self.line(format!("{} {}", if rep.pass { "PASS" } else { "FAIL" }, rep.name));
        for r in rep.rows.iter().filter(|r| !r.pass) {
            let msg = format!(
                "{}: {} (computed {:.9e}, reference {:.9e}, error {:.3e} > {:.3e})",
                rep.name, r.label, r.computed, r.reference, r.error, r.tolerance
            );
            self.line(format!("    {msg}"));
            self.failures.push(msg);
        }
        for n in &rep.notes {
            self.line(format!("    note: {n}"));
        }
        Ok(())
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(std::io::stdout(), "{}", text.as_ref());
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    /// Writes summary.txt and manifest.json; returns the failures.
    pub fn finish(mut self, args: Vec<String>, config: &RunConfig, runtime: f64) -> Result<Vec<String>> {
        let summary = std::mem::take(&mut self.summary);
        self.write("summary.txt", &summary)?;
        let mut files = self.files.clone();
        files.push("manifest.json".into());
        let m = Manifest {
            tool: "tfts".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            args,
            config: config.clone(),
            files,
            pass: self.failures.is_empty(),
            failures: self.failures.clone(),
            runtime_seconds: runtime,
        };
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&m)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.failures)
    }
}
