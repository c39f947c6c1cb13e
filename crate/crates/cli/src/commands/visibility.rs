use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::attenuation::{read_visibility_csv, visibility_report, ScatteringModel};

use super::attenuation::ModelArg;
use super::echo;
use crate::config::Format;
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    /// CSV with header `label,visibility_km`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub wavelength_nm: Option<f64>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Path length, km.
    #[arg(long)]
    pub distance_km: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub input: Option<PathBuf>,
    pub wavelength_nm: f64,
    pub model: ScatteringModel,
    pub distance_km: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            input: None,
            wavelength_nm: 1550.0,
            model: ScatteringModel::Kim,
            distance_km: 1.0,
        }
    }
}

pub fn run(p: &Params, format: Format) -> Result<(Artifact, String), CliError> {
    let module = CliError::module("attenuation");
    let path = p
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("visibility-report needs --input".into()))?;
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let records = read_visibility_csv(file).map_err(&module)?;
    let rows = visibility_report(&records, p.wavelength_nm, p.model, p.distance_km).map_err(&module)?;
    let worst = rows
        .iter()
        .max_by(|a, b| a.attenuation_db.total_cmp(&b.attenuation_db))
        .expect("report is non-empty");
    let summary = format!(
        "visibility-report: {} records, worst {} at {:.3} dB",
        rows.len(),
        worst.label,
        worst.attenuation_db
    );
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec!["label", "visibility_km", "p", "beta_fog_per_km", "attenuation_db"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.label.clone(),
                        num(r.visibility_km),
                        num(r.p),
                        num(r.beta_fog),
                        num(r.attenuation_db),
                    ]
                })
                .collect(),
        }),
        Format::Json => Artifact::Json(echo("visibility-report", None, p, serde_json::json!(rows))),
    };
    Ok((artifact, summary))
}
