//! Run configuration: JSON file, command-line overrides and defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// On-disk run configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // Input files named in a config are relative to the config itself.
        if let Some(Value::String(input)) = cfg.parameters.get("input") {
            let p = Path::new(input);
            if p.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new(""));
                let joined = base.join(p).to_string_lossy().into_owned();
                cfg.parameters.insert("input".into(), Value::String(joined));
            }
        }
        Ok(cfg)
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON run configuration; command-line flags take precedence over it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file. Without it the artifact goes to $SKYQ_OUT_DIR/<subcommand>.<ext>,
    /// or to stdout when that is unset.
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 1;

/// Where the artifact goes.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    File(PathBuf),
    Stdout,
}

#[derive(Debug)]
pub struct Job<P> {
    pub params: P,
    pub format: Format,
    pub seed: u64,
    pub target: Target,
}

/// Unset flags serialize as null and must not shadow the file.
fn strip_nulls(m: Map<String, Value>) -> Map<String, Value> {
    m.into_iter()
        .filter_map(|(k, v)| match v {
            Value::Null => None,
            Value::Object(o) => Some((k, Value::Object(strip_nulls(o)))),
            v => Some((k, v)),
        })
        .collect()
}

fn merge(base: &mut Map<String, Value>, over: Map<String, Value>) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Object(b)), Value::Object(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Resolves parameters with precedence flags > config file > defaults.
pub fn resolve<P: DeserializeOwned>(
    name: &str,
    common: &Common,
    flags: &impl Serialize,
    out_dir: Option<&Path>,
) -> Result<Job<P>, CliError> {
    let file = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(sub) = &file.subcommand {
        if sub != name {
            return Err(CliError::Config(format!(
                "config is for `{sub}`, not `{name}`"
            )));
        }
    }
    let mut params = file.parameters;
    match serde_json::to_value(flags) {
        Ok(Value::Object(over)) => merge(&mut params, strip_nulls(over)),
        Ok(_) => {}
        Err(e) => return Err(CliError::Config(e.to_string())),
    }
    let params: P = serde_json::from_value(Value::Object(params))
        .map_err(|e| CliError::Config(format!("parameters: {e}")))?;
    let format = common.format.or(file.output_format).unwrap_or_default();
    let target = match (&common.output, file.output_path, out_dir) {
        (Some(p), _, _) => Target::File(p.clone()),
        (None, Some(p), _) => Target::File(p),
        (None, None, Some(dir)) => Target::File(dir.join(format!("{name}.{}", format.extension()))),
        (None, None, None) => Target::Stdout,
    };
    Ok(Job {
        params,
        format,
        seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        target,
    })
}

/// Reads only the subcommand name from a config file.
pub fn subcommand_of(path: &Path) -> Result<String, CliError> {
    RunConfig::load(path)?
        .subcommand
        .ok_or_else(|| CliError::Config(format!("{}: missing `subcommand`", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `points` values from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>, CliError> {
    if points == 0 || !from.is_finite() || !to.is_finite() || to < from {
        return Err(CliError::Config(format!(
            "bad grid: from {from} to {to} with {points} points"
        )));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..points).map(|i| from + (to - from) * step(i)).collect()),
        Spacing::Log => {
            if from <= 0.0 {
                return Err(CliError::Config("log spacing needs a positive start".into()));
            }
            let (a, b) = (from.ln(), to.ln());
            Ok((0..points).map(|i| (a + (b - a) * step(i)).exp()).collect())
        }
    }
}
