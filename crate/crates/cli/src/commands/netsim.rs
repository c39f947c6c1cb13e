use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::repeater::{
    run_repetitions, run_teleportation_with, NoiseModel, NoiseSpec, Qubit, SimOptions,
    SwarmTopology, TimingMode, SPEED_OF_LIGHT,
};

use super::{echo, ChannelFlags, ChannelParams, CHANNEL};
use crate::config::Format;
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

const MODULE: &str = "repeater_chain";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    Ideal,
    Depolarizing,
    TransmittanceDriven,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimingArg {
    PreShared,
    RealTime,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    #[arg(long)]
    pub n_repeaters: Option<usize>,
    /// Hop length, km.
    #[arg(long)]
    pub hop_length: Option<f64>,
    /// Classical signal speed, m/s.
    #[arg(long)]
    pub classical_signal_speed: Option<f64>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// Depolarizing probability per hop.
    #[arg(long)]
    pub p: Option<f64>,
    /// Mean hop transmittance for transmittance-driven noise. Estimated from
    /// the channel flags when absent.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub bsm_success: Option<f64>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingArg>,
    /// Memory dephasing time constant, ns.
    #[arg(long)]
    pub dephasing_time_ns: Option<f64>,
    /// Bloch polar angle of the input qubit, rad.
    #[arg(long)]
    pub input_theta: Option<f64>,
    /// Bloch azimuth of the input qubit, rad.
    #[arg(long, allow_negative_numbers = true)]
    pub input_phi: Option<f64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Include the event log of the first run in JSON output.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub event_log: Option<bool>,
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Drone altitude for transmittance-driven noise, m.
    #[arg(long)]
    pub channel_altitude: Option<f64>,
    #[arg(long)]
    pub channel_zenith_deg: Option<f64>,
    #[arg(long)]
    pub channel_samples: Option<usize>,
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
    pub n_repeaters: usize,
    pub hop_length: f64,
    pub classical_signal_speed: f64,
    pub noise: NoiseArg,
    pub p: f64,
    pub eta: Option<f64>,
    pub bsm_success: f64,
    pub timing: TimingMode,
    pub dephasing_time_ns: Option<f64>,
    pub input_theta: f64,
    pub input_phi: f64,
    pub repetitions: usize,
    pub event_log: bool,
    pub channel: ChannelParams,
    pub channel_altitude: f64,
    pub channel_zenith_deg: f64,
    pub channel_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n_repeaters: 10,
            hop_length: 5.0,
            classical_signal_speed: SPEED_OF_LIGHT,
            noise: NoiseArg::Depolarizing,
            p: 0.05,
            eta: None,
            bsm_success: 1.0,
            timing: TimingMode::PreShared,
            dephasing_time_ns: None,
            input_theta: std::f64::consts::FRAC_PI_2,
            input_phi: 0.0,
            repetitions: 100,
            event_log: false,
            channel: ChannelParams::default(),
            channel_altitude: 100.0,
            channel_zenith_deg: 0.0,
            channel_samples: 10_000,
        }
    }
}

#[derive(Serialize)]
struct SweepRow {
    n_repeaters: usize,
    mean_fidelity: f64,
    mean_elapsed_ns: f64,
}

fn noise_model(p: &Params, seed: u64) -> Result<NoiseModel, CliError> {
    Ok(match p.noise {
        NoiseArg::Ideal => NoiseModel::Ideal,
        NoiseArg::Depolarizing => NoiseModel::Depolarizing { p: p.p },
        NoiseArg::TransmittanceDriven => match p.eta {
            Some(eta) => NoiseModel::TransmittanceDriven { eta },
            None => {
                let cond = p.channel.condition()?;
                let geom = p.channel.geometry(p.channel_altitude, p.channel_zenith_deg)?;
                NoiseModel::from_channel(&cond, &geom, p.channel_samples, seed)
                    .map_err(CliError::module(CHANNEL))?
            }
        },
    })
}

pub fn run(p: &Params, format: Format, seed: u64) -> Result<(Artifact, String), CliError> {
    let module = CliError::module(MODULE);
    let model = noise_model(p, seed)?;
    let topology = |n| SwarmTopology {
        n_repeaters: n,
        hop_length: p.hop_length,
        classical_signal_speed: p.classical_signal_speed,
        per_hop_noise: NoiseSpec {
            model,
            bsm_success: p.bsm_success,
        },
    };
    let input = Qubit::bloch(p.input_theta, p.input_phi);
    let options = SimOptions {
        timing: p.timing,
        dephasing_time_ns: p.dephasing_time_ns,
        ..SimOptions::default()
    };
    match format {
        Format::Csv => {
            let rows = (0..=p.n_repeaters)
                .map(|n| {
                    run_repetitions(&topology(n), &input, &options, p.repetitions, seed).map(|s| SweepRow {
                        n_repeaters: n,
                        mean_fidelity: s.mean_fidelity,
                        mean_elapsed_ns: s.mean_elapsed_ns,
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(&module)?;
            let last = rows.last().expect("sweep includes n = 0");
            let summary = format!(
                "netsim: n = 0..{}, fidelity {:.4} -> {:.4}, time {:.1} ns -> {:.1} ns",
                p.n_repeaters,
                rows[0].mean_fidelity,
                last.mean_fidelity,
                rows[0].mean_elapsed_ns,
                last.mean_elapsed_ns
            );
            let table = Table {
                header: vec!["n_repeaters", "mean_fidelity", "mean_elapsed_ns"],
                rows: rows
                    .iter()
                    .map(|r| vec![r.n_repeaters.to_string(), num(r.mean_fidelity), num(r.mean_elapsed_ns)])
                    .collect(),
            };
            Ok((Artifact::Csv(table), summary))
        }
        Format::Json => {
            let topo = topology(p.n_repeaters);
            let stats = run_repetitions(&topo, &input, &options, p.repetitions, seed).map_err(&module)?;
            let mut result = serde_json::json!({
                "noise": model,
                "total_span_km": topo.total_span(),
                "statistics": stats,
            });
            if p.event_log {
                let first = run_teleportation_with(&topo, &input, &options, seed).map_err(&module)?;
                result["event_log"] = serde_json::json!(first.event_log);
            }
            let summary = format!(
                "netsim: n = {}, mean fidelity {:.4}, mean time {:.1} ns",
                p.n_repeaters, stats.mean_fidelity, stats.mean_elapsed_ns
            );
            Ok((Artifact::Json(echo("netsim", Some(seed), p, result)), summary))
        }
    }
}
