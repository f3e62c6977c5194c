//! Run configuration: a flat `key = value` file overlaid with
//! command-line values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Figure1,
    Figure2,
    PhaseSweep,
    Spectrum,
    KemmerEvolve,
    FieldMap,
    JumpDemo,
    DispersionScan,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Figure1,
        Scenario::Figure2,
        Scenario::PhaseSweep,
        Scenario::Spectrum,
        Scenario::KemmerEvolve,
        Scenario::FieldMap,
        Scenario::JumpDemo,
        Scenario::DispersionScan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Figure1 => "figure1",
            Scenario::Figure2 => "figure2",
            Scenario::PhaseSweep => "phase-sweep",
            Scenario::Spectrum => "spectrum",
            Scenario::KemmerEvolve => "kemmer-evolve",
            Scenario::FieldMap => "field-map",
            Scenario::JumpDemo => "jump-demo",
            Scenario::DispersionScan => "dispersion-scan",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('_', "-");
        Scenario::ALL.into_iter().find(|sc| sc.name() == key).ok_or_else(|| {
            let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
            anyhow!("unknown scenario `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

/// Parameter keys use underscores; dashes are accepted on input.
pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
        let key = normalize_key(k);
        if key.is_empty() {
            bail!("line {}: empty key", n + 1);
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key `{key}`", n + 1);
        }
    }
    Ok(out)
}

pub fn read_flat(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_flat(&text).with_context(|| format!("in config {}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub allow_flags: bool,
    /// Scenario parameters, validated when the scenario runs.
    pub params: BTreeMap<String, String>,
}

const DEFAULT_SEED: u64 = 1;

impl ScenarioConfig {
    /// Build from a merged key-value map. Run-level keys are `scenario`,
    /// `seed`, `out`, `workers` and `allow_flags`; the rest are scenario
    /// parameters.
    pub fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        let scenario: Scenario =
            map.remove("scenario").ok_or_else(|| anyhow!("no scenario given"))?.parse()?;
        let seed = match map.remove("seed") {
            Some(s) => s.parse().map_err(|_| anyhow!("invalid parameter seed = `{s}`: expected a non-negative integer"))?,
            None => DEFAULT_SEED,
        };
        let out = PathBuf::from(map.remove("out").unwrap_or_else(|| format!("out/{scenario}")));
        let workers = match map.remove("workers") {
            Some(s) => s.parse().map_err(|_| anyhow!("invalid parameter workers = `{s}`: expected a positive integer"))?,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if workers == 0 {
            bail!("invalid parameter workers = 0: need at least one worker");
        }
        let allow_flags = match map.remove("allow_flags").as_deref() {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(s) => bail!("invalid parameter allow_flags = `{s}`: expected true or false"),
        };
        Ok(Self { scenario, seed, out, workers, allow_flags, params: map })
    }
}

/// Typed access to scenario parameters with defaults; rejects keys the
/// scenario does not know.
#[derive(Debug)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn new(scenario: Scenario, values: &BTreeMap<String, String>, known: &[&str]) -> Result<Self> {
        if let Some(k) = values.keys().find(|k| !known.contains(&k.as_str())) {
            bail!("unknown parameter `{k}` for scenario {scenario} (known: {})", known.join(", "));
        }
        Ok(Self { values: values.clone() })
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => bail!("invalid parameter {key} = `{s}`: expected a finite number"),
            },
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| anyhow!("invalid parameter {key} = `{s}`: expected a non-negative integer")),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.values.get(key).map(String::as_str) {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some(s) => bail!("invalid parameter {key} = `{s}`: expected true or false"),
        }
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str> {
        match self.values.get(key) {
            None => Ok(options[0]),
            Some(s) => options
                .iter()
                .find(|o| **o == s.as_str())
                .copied()
                .ok_or_else(|| anyhow!("invalid parameter {key} = `{s}`: expected one of {}", options.join(", "))),
        }
    }
}
