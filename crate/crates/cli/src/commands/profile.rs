use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::TurbulenceModel;

use super::echo;
use crate::config::{grid, Format, Spacing};
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    /// slcd-day, slcd-night-variant, hvb or fried.
    #[arg(long)]
    pub model: Option<String>,
    /// Upper-altitude wind speed for hvb, m/s.
    #[arg(long)]
    pub wind_speed: Option<f64>,
    /// Strength parameter K₀ for fried.
    #[arg(long)]
    pub k0: Option<f64>,
    /// Lowest altitude, m.
    #[arg(long)]
    pub from: Option<f64>,
    /// Highest altitude, m.
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub model: String,
    pub wind_speed: Option<f64>,
    pub k0: Option<f64>,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            model: "slcd-day".into(),
            wind_speed: None,
            k0: None,
            from: 1.0,
            to: 20_000.0,
            points: 100,
            spacing: Spacing::Linear,
        }
    }
}

pub fn run(p: &Params, format: Format) -> Result<(Artifact, String), CliError> {
    let module = CliError::module("turbulence_profiles");
    let model = TurbulenceModel::from_name(&p.model, p.wind_speed, p.k0).map_err(&module)?;
    let heights = grid(p.from, p.to, p.points, p.spacing)?;
    let cn2 = heights
        .iter()
        .map(|&h| model.cn2(h))
        .collect::<Result<Vec<_>, _>>()
        .map_err(&module)?;
    let summary = format!("profile {}: {} altitudes from {} m to {} m", p.model, heights.len(), p.from, p.to);
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec!["altitude_m", "cn2"],
            rows: heights.iter().zip(&cn2).map(|(h, c)| vec![num(*h), num(*c)]).collect(),
        }),
        Format::Json => Artifact::Json(echo(
            "profile",
            None,
            p,
            serde_json::json!({ "model": model, "altitude_m": heights, "cn2": cn2 }),
        )),
    };
    Ok((artifact, summary))
}
