use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::link_budget::{margin_sweep, LinkBudgetSpec};

use super::echo;
use crate::config::{grid, Format, Spacing};
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    /// Transmitted power, dBm.
    #[arg(long, allow_negative_numbers = true)]
    pub p_t: Option<f64>,
    /// Transmitter coupling loss, dB.
    #[arg(long)]
    pub a_tx: Option<f64>,
    /// Receiver coupling loss, dB.
    #[arg(long)]
    pub a_rx: Option<f64>,
    /// Half-angle divergence, rad.
    #[arg(long)]
    pub theta_div: Option<f64>,
    /// Fog attenuation, dB/km.
    #[arg(long)]
    pub alpha_fog: Option<f64>,
    /// Receiver sensitivity, dBm.
    #[arg(long, allow_negative_numbers = true)]
    pub s_r: Option<f64>,
    /// Shortest range, km.
    #[arg(long)]
    pub from: Option<f64>,
    /// Longest range, km.
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Comma-separated receiver diameters, m.
    #[arg(long, value_delimiter = ',')]
    pub diameters_m: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub p_t: f64,
    pub a_tx: f64,
    pub a_rx: f64,
    pub theta_div: f64,
    pub alpha_fog: f64,
    pub s_r: f64,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub diameters_m: Vec<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            p_t: 10.0,
            a_tx: 1.0,
            a_rx: 1.0,
            theta_div: 1e-3,
            alpha_fog: 1.0,
            s_r: -40.0,
            from: 0.5,
            to: 10.0,
            points: 20,
            spacing: Spacing::Linear,
            diameters_m: vec![0.05, 0.1, 0.2, 0.4],
        }
    }
}

pub fn run(p: &Params, format: Format) -> Result<(Artifact, String), CliError> {
    let ranges = grid(p.from, p.to, p.points, p.spacing)?;
    let template = LinkBudgetSpec {
        p_t: p.p_t,
        a_tx: p.a_tx,
        a_rx: p.a_rx,
        theta_div: p.theta_div,
        d_rx: p.diameters_m.first().copied().unwrap_or(f64::NAN),
        alpha_fog: p.alpha_fog,
        s_r: p.s_r,
        range: p.from,
    };
    let t = margin_sweep(&template, &ranges, &p.diameters_m).map_err(CliError::module("link_budget"))?;
    let notes: Vec<String> = t
        .rows
        .iter()
        .map(|r| match (r.operational, r.break_even_range) {
            (false, _) => format!("D={} m non-operational", r.diameter),
            (true, Some(l)) => format!("D={} m breaks even at {l:.3} km", r.diameter),
            (true, None) => format!("D={} m positive throughout", r.diameter),
        })
        .collect();
    let summary = format!("budget: {}", notes.join("; "));
    let artifact = match format {
        Format::Csv => {
            let mut rows = Vec::new();
            for row in &t.rows {
                for (l, m) in ranges.iter().zip(&row.margins_db) {
                    rows.push(vec![num(*l), num(row.diameter), num(*m), (*m >= 0.0).to_string()]);
                }
            }
            Artifact::Csv(Table {
                header: vec!["range_km", "diameter_m", "margin_db", "operational"],
                rows,
            })
        }
        Format::Json => Artifact::Json(echo("budget", None, p, serde_json::json!(t))),
    };
    Ok((artifact, summary))
}
