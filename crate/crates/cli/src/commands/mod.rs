pub mod attenuation;
pub mod beam;
pub mod budget;
pub mod netsim;
pub mod pdt;
pub mod profile;
pub mod surface;
pub mod visibility;

use clap::Args;
use serde::{Deserialize, Serialize};
use skyq::elliptic::{CentroidVariance, Cn2Source, LinkCondition, LinkDirection, SemiAxisDistribution};
use skyq::geometry::reference;
use skyq::{ChannelGeometry, Extinction, TurbulenceModel};

use crate::error::CliError;

const CHANNEL: &str = "elliptic_channel";

/// Link condition and receiver optics for the elliptic channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub direction: LinkDirection,
    pub daytime: bool,
    /// Particle density n₀, m⁻³. Defaults by time of day.
    pub n0: Option<f64>,
    pub alpha_p: f64,
    /// `fit` for the low-altitude fit, otherwise a profile name.
    pub cn2: String,
    pub wind_speed: Option<f64>,
    pub k0: Option<f64>,
    pub centroid_variance: CentroidVariance,
    pub semi_axis_distribution: SemiAxisDistribution,
    /// Vertical optical depth β in χ_ext = exp(−β sec φ).
    pub extinction_beta: f64,
    /// Fixed χ_ext; overrides `extinction_beta`.
    pub chi_ext: Option<f64>,
    pub w_d: f64,
    pub a_r: f64,
    pub wavelength_nm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        let cond = LinkCondition::reference(LinkDirection::Downlink, true);
        Self {
            direction: cond.direction,
            daytime: cond.daytime,
            n0: None,
            alpha_p: cond.alpha_p,
            cn2: "fit".into(),
            wind_speed: None,
            k0: None,
            centroid_variance: cond.centroid_variance,
            semi_axis_distribution: cond.semi_axis_distribution,
            extinction_beta: reference::EXTINCTION_BETA,
            chi_ext: None,
            w_d: reference::W_D,
            a_r: reference::A_R,
            wavelength_nm: reference::WAVELENGTH * 1e9,
        }
    }
}

impl ChannelParams {
    pub fn condition(&self) -> Result<LinkCondition, CliError> {
        let base = LinkCondition::reference(self.direction, self.daytime);
        let cn2 = match self.cn2.as_str() {
            "fit" => Cn2Source::LowAltitudeFit,
            name => Cn2Source::Profile(
                TurbulenceModel::from_name(name, self.wind_speed, self.k0)
                    .map_err(CliError::module(CHANNEL))?,
            ),
        };
        let cond = LinkCondition {
            n0: self.n0.unwrap_or(base.n0),
            alpha_p: self.alpha_p,
            cn2,
            centroid_variance: self.centroid_variance,
            semi_axis_distribution: self.semi_axis_distribution,
            ..base
        };
        cond.validate().map_err(CliError::module(CHANNEL))?;
        Ok(cond)
    }

    pub fn extinction(&self) -> Extinction {
        match self.chi_ext {
            Some(chi) => Extinction::Fixed(chi),
            None => Extinction::VerticalDepth(self.extinction_beta),
        }
    }

    pub fn geometry(&self, altitude: f64, zenith_deg: f64) -> Result<ChannelGeometry, CliError> {
        let optics = ChannelGeometry {
            altitude,
            zenith: zenith_deg.to_radians(),
            wavelength: self.wavelength_nm * 1e-9,
            w_d: self.w_d,
            a_r: self.a_r,
            chi_ext: 1.0,
        };
        optics
            .relocated(altitude, zenith_deg.to_radians(), self.extinction())
            .map_err(CliError::module(CHANNEL))
    }
}

/// Command-line overrides for [`ChannelParams`].
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ChannelFlags {
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Day-time conditions (the default).
    #[arg(long, conflicts_with = "night")]
    #[serde(skip)]
    pub daytime: bool,
    /// Night-time conditions.
    #[arg(long)]
    #[serde(skip)]
    pub night: bool,
    #[serde(rename = "daytime")]
    #[arg(skip)]
    pub daytime_override: Option<bool>,
    #[arg(long)]
    pub n0: Option<f64>,
    #[arg(long)]
    pub alpha_p: Option<f64>,
    /// `fit`, slcd-day, slcd-night-variant, hvb or fried.
    #[arg(long)]
    pub cn2: Option<String>,
    #[arg(long)]
    pub wind_speed: Option<f64>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long, value_enum)]
    pub centroid_variance: Option<CentroidArg>,
    #[arg(long, value_enum)]
    pub semi_axis_distribution: Option<SemiAxisArg>,
    #[arg(long)]
    pub extinction_beta: Option<f64>,
    #[arg(long)]
    pub chi_ext: Option<f64>,
}

impl ChannelFlags {
    /// Folds `--daytime`/`--night` into the serialized override.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.daytime_override = match (self.daytime, self.night) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        out
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentroidArg {
    AsPrinted,
    Squared,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiAxisArg {
    LogNormal,
    TruncatedNormal,
}

/// Echo of the resolved parameters for JSON artifacts.
pub fn echo<P: Serialize>(subcommand: &str, seed: Option<u64>, params: &P, result: serde_json::Value) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    m.insert("subcommand".into(), subcommand.into());
    if let Some(seed) = seed {
        m.insert("seed".into(), seed.into());
    }
    m.insert(
        "parameters".into(),
        serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
    );
    m.insert("result".into(), result);
    serde_json::Value::Object(m)
}
