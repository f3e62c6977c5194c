use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use pilotwave_cli::config::{normalize_key, read_flat};
use pilotwave_cli::{run, ScenarioConfig};

#[derive(Parser)]
#[command(name = "pilotwave", version, about = "Run pilot-wave radiation scenarios and invariant checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a scenario and write CSV/SVG artifacts with a manifest.
    Run(RunArgs),
    /// Run the invariant suite and print one line per check.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// figure1, figure2, phase-sweep, spectrum, kemmer-evolve, field-map,
    /// jump-demo or dispersion-scan.
    #[arg(value_name = "SCENARIO")]
    positional: Option<String>,
    #[arg(long)]
    scenario: Option<String>,
    /// Flat `key = value` file; command-line values take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Exit successfully even when trajectories or evolutions are flagged.
    #[arg(long)]
    allow_flags: bool,
    /// Any scenario parameter, as KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    numeric: NumericFlags,
}

/// Shortcuts for common scenario parameters.
#[derive(Args)]
struct NumericFlags {
    #[arg(long)]
    photons: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    r_abs: Option<String>,
    #[arg(long)]
    phases: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    omega0: Option<String>,
    #[arg(long)]
    trains: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    nu0: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    periods: Option<String>,
    #[arg(long)]
    extent: Option<String>,
    #[arg(long)]
    time: Option<String>,
}

impl NumericFlags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 16] {
        [
            ("photons", &self.photons),
            ("delta", &self.delta),
            ("t_max", &self.t_max),
            ("dt", &self.dt),
            ("r_abs", &self.r_abs),
            ("phases", &self.phases),
            ("gamma", &self.gamma),
            ("omega0", &self.omega0),
            ("trains", &self.trains),
            ("points", &self.points),
            ("nu0", &self.nu0),
            ("n", &self.n),
            ("h", &self.h),
            ("periods", &self.periods),
            ("extent", &self.extent),
            ("time", &self.time),
        ]
    }
}

fn resolve(args: RunArgs) -> Result<ScenarioConfig> {
    let mut map = match &args.config {
        Some(path) => read_flat(path)?,
        None => BTreeMap::new(),
    };
    match (args.positional, args.scenario) {
        (Some(a), Some(b)) if a != b => bail!("scenario given twice: `{a}` and `{b}`"),
        (Some(s), _) | (None, Some(s)) => {
            map.insert("scenario".into(), s);
        }
        (None, None) => {}
    }
    if let Some(seed) = args.seed {
        map.insert("seed".into(), seed.to_string());
    }
    if let Some(out) = args.out {
        map.insert("out".into(), out.to_string_lossy().into_owned());
    }
    if let Some(w) = args.workers {
        map.insert("workers".into(), w.to_string());
    }
    if args.allow_flags {
        map.insert("allow_flags".into(), "true".into());
    }
    for (k, v) in args.numeric.pairs() {
        if let Some(v) = v {
            map.insert(k.into(), v.clone());
        }
    }
    for kv in &args.set {
        let Some((k, v)) = kv.split_once('=') else { bail!("--set expects KEY=VALUE, got `{kv}`") };
        map.insert(normalize_key(k), v.trim().to_string());
    }
    ScenarioConfig::from_map(map)
}

fn run_scenario(args: RunArgs) -> Result<ExitCode> {
    let config = resolve(args)?;
    let outcome = run(&config)?;
    for (k, v) in &outcome.summary {
        println!("{k} = {v}");
    }
    println!("wrote {} files and manifest.txt to {}", outcome.manifest.len(), config.out.display());
    if outcome.flagged > 0 {
        eprintln!("{} flagged trajectories or evolutions", outcome.flagged);
        if !config.allow_flags {
            return Ok(ExitCode::from(3));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { seed } => {
            let report = pilotwave::verify::run_all(seed);
            print!("{report}");
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Run(args) => match run_scenario(args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
