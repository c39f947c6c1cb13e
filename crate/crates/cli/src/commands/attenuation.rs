use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::attenuation::{beta_fog, path_attenuation_db, size_distribution_p, ScatteringModel};

use super::echo;
use crate::config::{grid, Format, Spacing};
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Kim,
    Kruse,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Lowest visibility, km.
    #[arg(long)]
    pub from: Option<f64>,
    /// Highest visibility, km.
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Comma-separated wavelengths, nm.
    #[arg(long, value_delimiter = ',')]
    pub wavelengths_nm: Option<Vec<f64>>,
    /// Path length, km.
    #[arg(long)]
    pub distance_km: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub model: ScatteringModel,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub wavelengths_nm: Vec<f64>,
    pub distance_km: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            model: ScatteringModel::Kim,
            from: 0.1,
            to: 60.0,
            points: 100,
            spacing: Spacing::Log,
            wavelengths_nm: vec![850.0, 950.0, 1550.0],
            distance_km: 1.0,
        }
    }
}

#[derive(Serialize)]
struct Row {
    visibility_km: f64,
    wavelength_nm: f64,
    p: f64,
    beta_fog: f64,
    attenuation_db: f64,
}

pub fn run(p: &Params, format: Format) -> Result<(Artifact, String), CliError> {
    let module = CliError::module("attenuation");
    if p.wavelengths_nm.is_empty() {
        return Err(CliError::Config("no wavelengths given".into()));
    }
    let mut rows = Vec::new();
    for v in grid(p.from, p.to, p.points, p.spacing)? {
        let q = size_distribution_p(p.model, v).map_err(&module)?;
        for &l in &p.wavelengths_nm {
            let beta = beta_fog(v, l, q).map_err(&module)?;
            rows.push(Row {
                visibility_km: v,
                wavelength_nm: l,
                p: q,
                beta_fog: beta,
                attenuation_db: path_attenuation_db(beta, p.distance_km).map_err(&module)?,
            });
        }
    }
    let summary = format!("attenuation ({}): {} rows over {} km", p.model, rows.len(), p.distance_km);
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec!["visibility_km", "wavelength_nm", "p", "beta_fog_per_km", "attenuation_db"],
            rows: rows
                .iter()
                .map(|r| {
                    [r.visibility_km, r.wavelength_nm, r.p, r.beta_fog, r.attenuation_db]
                        .iter()
                        .map(|&x| num(x))
                        .collect()
                })
                .collect(),
        }),
        Format::Json => Artifact::Json(echo("attenuation", None, p, serde_json::json!(rows))),
    };
    Ok((artifact, summary))
}
