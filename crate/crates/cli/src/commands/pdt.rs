use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::elliptic::{pdt, PDT_DECIMALS};

use super::{echo, ChannelFlags, ChannelParams, CHANNEL};
use crate::config::Format;
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Drone altitude, m.
    #[arg(long)]
    pub altitude: Option<f64>,
    /// Zenith angle, degrees.
    #[arg(long)]
    pub zenith_deg: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
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
    pub altitude: f64,
    pub zenith_deg: f64,
    pub samples: usize,
    pub bins: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            altitude: 220.0,
            zenith_deg: 0.0,
            samples: 100_000,
            bins: 100,
        }
    }
}

pub fn run(p: &Params, format: Format, seed: u64) -> Result<(Artifact, String), CliError> {
    let cond = p.channel.condition()?;
    let geom = p.channel.geometry(p.altitude, p.zenith_deg)?;
    let h = pdt(&cond, &geom, p.samples, p.bins, seed).map_err(CliError::module(CHANNEL))?;
    let summary = format!(
        "pdt: {} samples, mode {:.5}, mean {:.6} ± {:.1e}",
        h.n_samples,
        h.mode_center(),
        h.mean,
        h.std_error
    );
    let decimals = PDT_DECIMALS as usize;
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec!["bin_center", "probability"],
            rows: h
                .bin_centers()
                .iter()
                .zip(&h.probabilities)
                .map(|(c, pr)| vec![format!("{c:.decimals$}"), num(*pr)])
                .collect(),
        }),
        Format::Json => Artifact::Json(echo(
            "pdt",
            Some(seed),
            p,
            serde_json::json!({ "chi_ext": geom.chi_ext, "histogram": h }),
        )),
    };
    Ok((artifact, summary))
}
