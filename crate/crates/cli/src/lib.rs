//! Scenario runner behind the `pilotwave` binary: resolves a
//! [`ScenarioConfig`], runs it on a worker pool of the requested size and
//! writes CSV/SVG artifacts plus a `manifest.txt` of content hashes.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod scenarios;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pilotwave::io::csv_string;
use sha2::{Digest, Sha256};

pub use config::{Params, Scenario, ScenarioConfig};

/// Files and summary values produced by one scenario, before writing.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    summary: Vec<(String, String)>,
    flagged: usize,
}

impl Artifacts {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents.into_bytes()));
    }

    fn summary(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// `(relative path, sha-256 hex)` for every file written.
    pub manifest: Vec<(String, String)>,
    pub summary: Vec<(String, String)>,
    /// Flagged trajectories or evolutions.
    pub flagged: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolved parameters that determine the numeric output. The output
/// directory and worker count are left out so that runs differing only in
/// those produce identical files.
fn config_record(config: &ScenarioConfig) -> String {
    let mut s = format!("scenario = {}\nseed = {}\n", config.scenario, config.seed);
    for (k, v) in &config.params {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

/// Run the scenario and write its artifacts under `config.out`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("building the worker pool")?;
    let mut art = pool.install(|| scenarios::run(config))?;
    let rows: Vec<Vec<String>> = art.summary.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
    art.file("summary.csv", csv_string(&["key", "value"], &rows));
    art.file("config.txt", config_record(config));
    fs::create_dir_all(&config.out).with_context(|| format!("creating {}", config.out.display()))?;
    let mut manifest = Vec::new();
    for (name, bytes) in &art.files {
        write(&config.out.join(name), bytes)?;
        manifest.push((name.clone(), sha256_hex(bytes)));
    }
    let rows: Vec<Vec<String>> = manifest.iter().map(|(p, h)| vec![p.clone(), h.clone()]).collect();
    write(&config.out.join("manifest.txt"), csv_string(&["path", "sha256"], &rows).as_bytes())?;
    Ok(RunOutcome { manifest, summary: art.summary, flagged: art.flagged })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_value() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
