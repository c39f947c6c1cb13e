use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::attenuation::path_attenuation_db;
use skyq::beam::{
    aperture_area, diffraction_transmissivity, divergence_loss_db, far_field_transmissivity,
    overall_transmissivity, plob_upper_bound, Curvature, GaussianBeam,
};

use super::echo;
use crate::config::{grid, Format, Spacing};
use crate::error::CliError;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Flags {
    /// Initial spot size, m.
    #[arg(long)]
    pub w0: Option<f64>,
    #[arg(long)]
    pub wavelength_nm: Option<f64>,
    /// Wavefront radius of curvature, m. Collimated when absent.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Receiver aperture radius, m.
    #[arg(long)]
    pub a_r: Option<f64>,
    /// Transmitter optics diameter for the divergence loss, m.
    #[arg(long)]
    pub d_tx: Option<f64>,
    /// Receiver optics diameter for the divergence loss, m.
    #[arg(long)]
    pub d_rx: Option<f64>,
    #[arg(long)]
    pub eta_eff: Option<f64>,
    /// Atmospheric extinction along the path, km⁻¹.
    #[arg(long)]
    pub beta_atm: Option<f64>,
    /// Shortest distance, m.
    #[arg(long)]
    pub from: Option<f64>,
    /// Longest distance, m.
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
    pub w0: f64,
    pub wavelength_nm: f64,
    pub radius: Option<f64>,
    pub a_r: f64,
    pub d_tx: f64,
    pub d_rx: f64,
    pub eta_eff: f64,
    pub beta_atm: f64,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            w0: 0.01,
            wavelength_nm: 810.0,
            radius: None,
            a_r: 0.0264,
            d_tx: 0.05,
            d_rx: 0.05,
            eta_eff: 1.0,
            beta_atm: 0.0,
            from: 10.0,
            to: 5000.0,
            points: 100,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Serialize)]
struct Row {
    z_m: f64,
    spot_size_m: f64,
    eta_d: f64,
    eta_far_field: f64,
    plob_bits: f64,
    far_field: bool,
    divergence_loss_db: f64,
    eta_overall: f64,
}

pub fn run(p: &Params, format: Format) -> Result<(Artifact, String), CliError> {
    let module = CliError::module("beam_optics");
    let curvature = p.radius.map_or(Curvature::Collimated, Curvature::Radius);
    let beam = GaussianBeam::new(p.w0, p.wavelength_nm * 1e-9, curvature).map_err(&module)?;
    let (area_t, area_r) = (aperture_area(p.d_tx), aperture_area(p.d_rx));
    let rows = grid(p.from, p.to, p.points, p.spacing)?
        .into_iter()
        .map(|z| {
            let w = beam.spot_size(z)?;
            let eta_d = diffraction_transmissivity(p.a_r, w)?;
            let plob = plob_upper_bound(p.a_r, w)?;
            let att_db = path_attenuation_db(p.beta_atm, z * 1e-3)?;
            Ok(Row {
                z_m: z,
                spot_size_m: w,
                eta_d,
                eta_far_field: far_field_transmissivity(p.a_r, w)?,
                plob_bits: plob.bits,
                far_field: plob.far_field,
                divergence_loss_db: divergence_loss_db(area_t, area_r, beam.wavelength, z)?,
                eta_overall: overall_transmissivity(eta_d, p.eta_eff, 10f64.powf(-att_db / 10.0))?,
            })
        })
        .collect::<Result<Vec<_>, skyq::Error>>()
        .map_err(&module)?;
    let last = rows.last().expect("grid is non-empty");
    let summary = format!(
        "beam: {} distances, spot {:.4e} m and eta_d {:.4} at {} m",
        rows.len(),
        last.spot_size_m,
        last.eta_d,
        last.z_m
    );
    let artifact = match format {
        Format::Csv => Artifact::Csv(Table {
            header: vec![
                "z_m",
                "spot_size_m",
                "eta_d",
                "eta_far_field",
                "plob_bits",
                "far_field",
                "divergence_loss_db",
                "eta_overall",
            ],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.z_m),
                        num(r.spot_size_m),
                        num(r.eta_d),
                        num(r.eta_far_field),
                        num(r.plob_bits),
                        r.far_field.to_string(),
                        num(r.divergence_loss_db),
                        num(r.eta_overall),
                    ]
                })
                .collect(),
        }),
        Format::Json => Artifact::Json(echo("beam", None, p, serde_json::json!(rows))),
    };
    Ok((artifact, summary))
}
