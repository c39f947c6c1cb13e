use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::elliptic::transmittance_surface;

use super::{echo, ChannelFlags, ChannelParams, CHANNEL};
use crate::config::Format;
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Comma-separated drone altitudes, m.
    #[arg(long, value_delimiter = ',')]
    pub altitudes: Option<Vec<f64>>,
    /// Comma-separated zenith angles, degrees.
    #[arg(long, value_delimiter = ',')]
    pub zeniths_deg: Option<Vec<f64>>,
    /// Monte Carlo samples per cell.
    #[arg(long)]
    pub samples: Option<usize>,
}

impl Flags {
    pub fn normalized(&self) -> Self {
        Self {
            channel: self.channel.normalized(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub channel: ChannelParams,
    pub altitudes: Vec<f64>,
    pub zeniths_deg: Vec<f64>,
    pub samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            altitudes: (0..12).map(|i| 20.0 + 20.0 * i as f64).collect(),
            zeniths_deg: (0..10).map(|i| 8.5 * i as f64).collect(),
            samples: 10_000,
        }
    }
}

pub fn run(p: &Params, format: Format, seed: u64) -> Result<(Artifact, String), CliError> {
    let cond = p.channel.condition()?;
    let Some(&first) = p.altitudes.first() else {
        return Err(CliError::Config("no altitudes given".into()));
    };
    let optics = p.channel.geometry(first, 0.0)?;
    let zeniths: Vec<f64> = p.zeniths_deg.iter().map(|z| z.to_radians()).collect();
    let s = transmittance_surface(
        &cond,
        &optics,
        p.channel.extinction(),
        &p.altitudes,
        &zeniths,
        p.samples,
        seed,
    )
    .map_err(CliError::module(CHANNEL))?;
    let best = s
        .cells
        .iter()
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("surface is non-empty");
    let summary = format!(
        "surface: {} cells × {} samples, best mean {:.6} at {} m, {:.1} deg",
        s.cells.len(),
        p.samples,
        best.mean,
        best.altitude,
        best.zenith.to_degrees()
    );
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec!["altitude_m", "zenith_deg", "mean_transmittance", "std_error"],
            rows: s
                .cells
                .iter()
                .zip(p.altitudes.iter().flat_map(|_| p.zeniths_deg.iter()))
                .map(|(c, z)| vec![num(c.altitude), num(*z), num(c.mean), num(c.std_error)])
                .collect(),
        }),
        Format::Json => Artifact::Json(echo("surface", Some(seed), p, serde_json::json!(s))),
    };
    Ok((artifact, summary))
}
