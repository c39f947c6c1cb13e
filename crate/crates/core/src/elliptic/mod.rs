//! Elliptic-beam channel model for drone links.
//!
//! The received beam is an ellipse described by
//! `V = (x₀, y₀, W₁, W₂, θ)`. Its first and second moments follow from the
//! link direction, the turbulence strength at the drone altitude and the
//! scattering particle density ([`beam_moments`]). Random draws of `V`
//! ([`BeamSampler`]) are pushed through the aperture transmittance integral
//! ([`elliptic_transmittance`]) to build the probability distribution of
//! transmittance ([`pdt`]) and altitude/zenith surfaces
//! ([`transmittance_surface`]).

mod moments;
mod montecarlo;
mod sampling;
mod transmittance;

pub use moments::{beam_moments, BeamMoments};
pub use montecarlo::{
    pdt, sample_transmittances, transmittance_surface, PdtHistogram, SurfaceCell,
    TransmittanceSurface, MIN_PDT_SAMPLES, PDT_DECIMALS,
};
pub use sampling::{sample_beam_params, sample_stream, BeamSampler};
pub use transmittance::{
    elliptic_transmittance, elliptic_transmittance_with, Quadrature, TransmittanceOptions,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{reference, LOW_ALTITUDE_RANGE};
use crate::turbulence::TurbulenceModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkDirection {
    /// Ground to drone.
    Uplink,
    /// Drone to ground.
    Downlink,
}

/// Where C_n² at the drone altitude comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cn2Source {
    /// Low-altitude power-law fits: `3.13e-13/h` by day and
    /// `4.008e-13/h^1.054` by night.
    LowAltitudeFit,
    /// Any named altitude profile.
    Profile(TurbulenceModel),
}

/// Interpretation of the downlink centroid variance `α_p z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentroidVariance {
    /// `⟨x₀²⟩ = α_p z`, numerically in m².
    AsPrinted,
    /// `⟨x₀²⟩ = (α_p z)²`, the dimensionally consistent reading.
    Squared,
}

/// Distribution family of the squared semi-axes `(W₁², W₂²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiAxisDistribution {
    /// Bivariate log-normal matched to the mean and covariance.
    LogNormal,
    /// Bivariate normal, redrawn until both components are positive.
    TruncatedNormal,
}

/// Atmospheric and pointing conditions of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkCondition {
    pub direction: LinkDirection,
    pub daytime: bool,
    /// Scattering particle density n₀, m⁻³.
    pub n0: f64,
    /// Angular pointing error α_p, rad (downlink only).
    pub alpha_p: f64,
    pub cn2: Cn2Source,
    pub centroid_variance: CentroidVariance,
    pub semi_axis_distribution: SemiAxisDistribution,
}

impl LinkCondition {
    /// Reference drone-link parameters for the given direction and time of day.
    pub fn reference(direction: LinkDirection, daytime: bool) -> Self {
        Self {
            direction,
            daytime,
            n0: if daytime {
                reference::N0_DAY
            } else {
                reference::N0_NIGHT
            },
            alpha_p: reference::POINTING_ERROR,
            cn2: Cn2Source::LowAltitudeFit,
            centroid_variance: CentroidVariance::AsPrinted,
            semi_axis_distribution: SemiAxisDistribution::LogNormal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n0 >= 0.0 && self.n0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "n0",
                value: self.n0,
                reason: "particle density must be non-negative",
            });
        }
        if !(self.alpha_p >= 0.0 && self.alpha_p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha_p",
                value: self.alpha_p,
                reason: "pointing error must be non-negative",
            });
        }
        if let Cn2Source::Profile(m) = self.cn2 {
            m.validate()?;
        }
        Ok(())
    }

    /// C_n² at `altitude` metres.
    pub fn cn2_at(&self, altitude: f64) -> Result<f64> {
        match self.cn2 {
            Cn2Source::LowAltitudeFit => {
                if !(altitude > 0.0) {
                    return Err(Error::InvalidGeometry(format!(
                        "altitude must be positive, got {altitude}"
                    )));
                }
                if altitude < LOW_ALTITUDE_RANGE.0 || altitude > LOW_ALTITUDE_RANGE.1 {
                    log::warn!(
                        "altitude {altitude} m is outside the {}-{} m range of the low-altitude C_n2 fit",
                        LOW_ALTITUDE_RANGE.0,
                        LOW_ALTITUDE_RANGE.1
                    );
                }
                Ok(if self.daytime {
                    3.13e-13 / altitude
                } else {
                    4.008e-13 / altitude.powf(1.054)
                })
            }
            Cn2Source::Profile(m) => m.cn2(altitude),
        }
    }
}

/// One realization of the elliptic beam at the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// Centroid x₀, m.
    pub x0: f64,
    /// Centroid y₀, m.
    pub y0: f64,
    /// Squared semi-axis W₁², m².
    pub w1_sq: f64,
    /// Squared semi-axis W₂², m².
    pub w2_sq: f64,
    /// Orientation of the W₁ axis, rad. Sampled beams have θ ∈ [0, π/2];
    /// the transmittance accepts any angle.
    pub theta: f64,
}

impl BeamParams {
    pub fn circular(x0: f64, y0: f64, w: f64) -> Self {
        Self {
            x0,
            y0,
            w1_sq: w * w,
            w2_sq: w * w,
            theta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w1_sq > 0.0 && self.w2_sq > 0.0 && self.w1_sq.is_finite() && self.w2_sq.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "w_sq",
                value: self.w1_sq.min(self.w2_sq),
                reason: "squared semi-axes must be positive and finite",
            });
        }
        if !(self.x0.is_finite() && self.y0.is_finite() && self.theta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beam",
                value: f64::NAN,
                reason: "centroid and orientation must be finite",
            });
        }
        Ok(())
    }

    /// Centroid distance ρ₀ from the aperture centre.
    pub fn rho0(&self) -> f64 {
        self.x0.hypot(self.y0)
    }
}
