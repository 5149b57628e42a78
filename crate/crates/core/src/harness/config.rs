//! Command-line options, JSON config files and validated experiment
//! configurations.
//!
//! Every subcommand's options may also come from `--config PATH`, a JSON
//! object whose keys are the option names in snake case. Flags given on the
//! command line win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::eviction::PolicyKind;
use crate::walk::Exclusion;

#[derive(Parser, Debug)]
#[command(name = "rwcuckoo", version, about = "Random walk cuckoo hashing and hypergraph peeling experiments")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// JSON file supplying option values for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a random hypergraph and write it as JSON.
    Gen(GenArgs),
    /// Peel a hypergraph and report peeling numbers and path counts.
    Peel(PeelArgs),
    /// Bulk random walk insertion into a cuckoo table.
    RwBench(RwBenchArgs),
    /// Run the random eviction processes on peelable random hypergraphs.
    Rep(RepArgs),
    /// Solve for the 2-core threshold of random k-uniform hypergraphs.
    Thresholds(ThresholdArgs),
    /// Simulate peeling of the configuration model in continuous time.
    ContPeel(ContPeelArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge count; defaults to `load·n`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub load: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeelArgs {
    /// Hypergraph JSON as written by `gen`; otherwise one is sampled.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub load: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pick degree-1 vertices uniformly instead of lowest index first.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub randomize: bool,
    /// Per-edge rows are dropped above this many edges.
    #[arg(long)]
    pub max_rows: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RwBenchArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub load: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allow a key to return to the bucket it was just evicted from.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub no_iold: bool,
    /// Exclude only one copy of the previous bucket among duplicate choices.
    #[arg(long, conflicts_with = "no_iold")]
    #[serde(skip_serializing_if = "is_false")]
    pub iold_one_copy: bool,
    /// Per-insertion move cap.
    #[arg(long)]
    pub move_cap: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Rep,
    RepPrime,
    /// Parallel insertion threads under the policy as scheduler.
    Parallel,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Rep => "rep",
            Variant::RepPrime => "rep-prime",
            Variant::Parallel => "parallel",
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// fifo, lifo, random, max-peel or rr.
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Round cap; defaults to `200·k·m`.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContPeelArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Load `m/n`.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of independent runs.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample times as `start:step:end`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Time after which heavy balls are checked against `B/(2k)`.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Only the small-instance oracle suites.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub quick: bool,
    /// Run only these acceptance criteria (repeatable).
    #[arg(long = "criterion", value_name = "ID")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<u32>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

pub fn read_config_file(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let value: Value = serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_owned(), source })?;
    if !value.is_object() {
        return Err(Error::invalid(format!("{}: config must be a JSON object", path.display())));
    }
    Ok(value)
}

/// Overlays the options given on the command line onto the config file.
pub fn merge<T: Serialize + DeserializeOwned>(cli: T, file: Option<&Value>) -> Result<T> {
    let Some(Value::Object(base)) = file else { return Ok(cli) };
    let mut merged = base.clone();
    if let Value::Object(given) = serde_json::to_value(&cli).expect("options serialize") {
        merged.extend(given.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::invalid(format!("config file: {e}")))
}

fn positive(name: &str, value: usize) -> Result<usize> {
    if value == 0 {
        return Err(Error::invalid(format!("--{name} must be positive")));
    }
    Ok(value)
}

fn uniformity(k: usize) -> Result<usize> {
    if k < 2 {
        return Err(Error::invalid(format!("--k must be at least 2, got {k}")));
    }
    Ok(k)
}

fn fraction(name: &str, value: f64) -> Result<f64> {
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::invalid(format!("--{name} must lie in (0, 1), got {value}")));
    }
    Ok(value)
}

fn edges_for(n: usize, m: Option<usize>, load: Option<f64>) -> Result<usize> {
    match (m, load) {
        (Some(m), _) => Ok(m),
        (None, load) => Ok((fraction("load", load.unwrap_or(0.75))? * n as f64).floor() as usize),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelConfig {
    pub input: Option<PathBuf>,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub randomize: bool,
    pub max_rows: usize,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwBenchConfig {
    pub n: usize,
    pub k: usize,
    pub load: f64,
    pub trials: u64,
    pub seed: u64,
    pub exclusion: Exclusion,
    pub move_cap: Option<u64>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub policy: PolicyKind,
    pub variant: Variant,
    pub trials: u64,
    pub seed: u64,
    pub cap: Option<u64>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContPeelConfig {
    pub n: usize,
    pub c: f64,
    pub k: usize,
    pub seeds: u64,
    pub seed: u64,
    pub grid: String,
    pub t0: f64,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub quick: bool,
    pub criteria: Vec<u32>,
    pub json: Option<PathBuf>,
}

/// A validated configuration of one subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Gen(GenConfig),
    Peel(PeelConfig),
    RwBench(RwBenchConfig),
    Rep(RepConfig),
    Thresholds(ThresholdConfig),
    ContPeel(ContPeelConfig),
    Verify(VerifyConfig),
}

impl ExperimentConfig {
    /// Merges command-line options with the optional config file and
    /// validates the result.
    pub fn resolve(command: Command, file: Option<&Value>) -> Result<Self> {
        Ok(match command {
            Command::Gen(a) => {
                let a = merge(a, file)?;
                let n = positive("n", a.n.unwrap_or(1000))?;
                ExperimentConfig::Gen(GenConfig {
                    n,
                    m: edges_for(n, a.m, a.load)?,
                    k: uniformity(a.k.unwrap_or(3))?,
                    seed: a.seed.unwrap_or(0),
                    out: a.out,
                })
            }
            Command::Peel(a) => {
                let a = merge(a, file)?;
                let n = positive("n", a.n.unwrap_or(1000))?;
                ExperimentConfig::Peel(PeelConfig {
                    input: a.input,
                    n,
                    m: edges_for(n, a.m, a.load)?,
                    k: uniformity(a.k.unwrap_or(3))?,
                    seed: a.seed.unwrap_or(0),
                    randomize: a.randomize,
                    max_rows: a.max_rows.unwrap_or(10_000),
                    csv: a.csv,
                    json: a.json,
                })
            }
            Command::RwBench(a) => {
                let a = merge(a, file)?;
                let exclusion = match (a.no_iold, a.iold_one_copy) {
                    (true, true) => return Err(Error::invalid("--no-iold conflicts with --iold-one-copy")),
                    (true, false) => Exclusion::Off,
                    (false, true) => Exclusion::OneCopy,
                    (false, false) => Exclusion::AllCopies,
                };
                ExperimentConfig::RwBench(RwBenchConfig {
                    n: positive("n", a.n.unwrap_or(10_000))?,
                    k: uniformity(a.k.unwrap_or(3))?,
                    load: fraction("load", a.load.unwrap_or(0.75))?,
                    trials: a.trials.unwrap_or(10),
                    seed: a.seed.unwrap_or(0),
                    exclusion,
                    move_cap: a.move_cap,
                    csv: a.csv,
                    json: a.json,
                })
            }
            Command::Rep(a) => {
                let a = merge(a, file)?;
                let n = positive("n", a.n.unwrap_or(1000))?;
                ExperimentConfig::Rep(RepConfig {
                    n,
                    m: edges_for(n, a.m, None)?,
                    k: uniformity(a.k.unwrap_or(3))?,
                    policy: a.policy.unwrap_or(PolicyKind::Fifo),
                    variant: a.variant.unwrap_or(Variant::Rep),
                    trials: a.trials.unwrap_or(10),
                    seed: a.seed.unwrap_or(0),
                    cap: a.cap,
                    csv: a.csv,
                    json: a.json,
                })
            }
            Command::Thresholds(a) => {
                let a = merge(a, file)?;
                let (k_min, k_max) = (a.k_min.unwrap_or(3), a.k_max.unwrap_or(12));
                if k_min < 3 || k_max < k_min || k_max > 64 {
                    return Err(Error::invalid(format!("need 3 <= k-min <= k-max <= 64, got {k_min}..{k_max}")));
                }
                ExperimentConfig::Thresholds(ThresholdConfig { k_min, k_max, csv: a.csv, json: a.json })
            }
            Command::ContPeel(a) => {
                let a = merge(a, file)?;
                let c = a.c.unwrap_or(0.7);
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::invalid(format!("--c must be a non-negative load, got {c}")));
                }
                let grid = a.grid.unwrap_or_else(|| "0:0.05:6".to_owned());
                crate::analysis::parse_grid(&grid)?;
                let t0 = a.t0.unwrap_or(3.0);
                if !(t0 >= 0.0 && t0.is_finite()) {
                    return Err(Error::invalid(format!("--t0 must be a non-negative time, got {t0}")));
                }
                ExperimentConfig::ContPeel(ContPeelConfig {
                    n: positive("n", a.n.unwrap_or(100_000))?,
                    c,
                    k: uniformity(a.k.unwrap_or(3))?,
                    seeds: a.seeds.unwrap_or(1),
                    seed: a.seed.unwrap_or(0),
                    grid,
                    t0,
                    csv: a.csv,
                    json: a.json,
                })
            }
            Command::Verify(a) => {
                let a = merge(a, file)?;
                if let Some(bad) = a.criteria.iter().find(|&&id| !(1..=11).contains(&id)) {
                    return Err(Error::invalid(format!("no acceptance criterion {bad}; valid ids are 1..=11")));
                }
                ExperimentConfig::Verify(VerifyConfig { quick: a.quick, criteria: a.criteria, json: a.json })
            }
        })
    }
}
