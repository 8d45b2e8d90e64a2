//! TOML run configuration and its merge with command-line flags.

use crate::output::RunConfig;
use anyhow::{Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use tfts::acceptance::Tolerances;

pub const OUT_ENV: &str = "TFTS_OUT_DIR";
const DEFAULT_OUT: &str = "tfts-out";
const DEFAULT_PATHS: usize = 10_000;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub mc_paths: Option<usize>,
    pub tolerances: Tolerances,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub mc_paths: Option<usize>,
}

/// Flag, then config file, then environment, then default.
pub fn resolve(file: FileConfig, cli: &Overrides) -> Result<RunConfig> {
    let jobs = cli.jobs.or(file.jobs).unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if jobs == 0 {
        anyhow::bail!("jobs must be at least 1");
    }
    let out_dir = cli
        .out
        .clone()
        .or(file.out_dir)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mc_paths = cli.mc_paths.or(file.mc_paths).unwrap_or(DEFAULT_PATHS);
    Ok(RunConfig { seed: cli.seed.or(file.seed).unwrap_or(0), jobs, out_dir, mc_paths, tolerances: file.tolerances })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_tolerance_table_keeps_defaults() {
        let f: FileConfig = toml::from_str("seed = 7\n[tolerances]\nfdd_covariance = 0.05\n").unwrap();
        let c = resolve(f, &Overrides { out: Some("x".into()), ..Default::default() }).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.tolerances.fdd_covariance, 0.05);
        assert_eq!(c.tolerances.polarization, Tolerances::default().polarization);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sede = 1\n").is_err());
        assert!(toml::from_str::<FileConfig>("[tolerances]\nfdd = 1.0\n").is_err());
    }

    #[test]
    fn flags_beat_the_file() {
        let f: FileConfig = toml::from_str("seed = 7\nmc_paths = 500\nout_dir = \"a\"\n").unwrap();
        let c = resolve(f, &Overrides { seed: Some(3), out: Some("b".into()), ..Default::default() }).unwrap();
        assert_eq!((c.seed, c.mc_paths, c.out_dir), (3, 500, PathBuf::from("b")));
    }
}
