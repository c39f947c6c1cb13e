//! Slant-path geometry between a ground station and a drone.

use serde::{Deserialize, Serialize};

use crate::attenuation::{atm_transmissivity, ExtinctionProfile};
use crate::error::{Error, Result};

/// Largest admissible zenith angle, degrees (exclusive).
pub const MAX_ZENITH_DEG: f64 = 85.0;

/// Drone altitudes covered by the low-altitude C_n² fits, metres.
pub const LOW_ALTITUDE_RANGE: (f64, f64) = (18.5, 240.0);

/// Reference link parameters for drone-based links.
pub mod reference {
    /// Beam spot size at the receiver, m.
    pub const W_D: f64 = 0.0115;
    /// Receiver aperture radius, m.
    pub const A_R: f64 = 0.0264;
    /// Signal wavelength, m.
    pub const WAVELENGTH: f64 = 810e-9;
    /// Vertical extinction optical depth entering χ_ext(φ).
    pub const EXTINCTION_BETA: f64 = 0.7;
    /// Angular pointing error, rad.
    pub const POINTING_ERROR: f64 = 2e-6;
    /// Scattering particle density at night, m⁻³.
    pub const N0_NIGHT: f64 = 0.61;
    /// Scattering particle density by day, m⁻³.
    pub const N0_DAY: f64 = 0.01;
}

/// How χ_ext is obtained for a geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extinction {
    /// Constant-α profile with this vertical optical depth, giving
    /// χ_ext = exp(-depth · sec φ).
    VerticalDepth(f64),
    /// Fixed χ_ext regardless of geometry.
    Fixed(f64),
}

impl Default for Extinction {
    fn default() -> Self {
        Extinction::VerticalDepth(reference::EXTINCTION_BETA)
    }
}

/// Ground-to-drone geometry and receiver optics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelGeometry {
    /// Drone altitude h̄, m.
    pub altitude: f64,
    /// Zenith angle φ, rad.
    pub zenith: f64,
    /// Wavelength, m.
    pub wavelength: f64,
    /// Beam spot size w_D, m.
    pub w_d: f64,
    /// Receiver aperture radius a_r, m.
    pub a_r: f64,
    /// Extinction factor χ_ext ∈ (0, 1].
    pub chi_ext: f64,
}

impl ChannelGeometry {
    /// Reference optics at the given altitude (m) and zenith angle (rad),
    /// with χ_ext = exp(-β sec φ) obtained from a constant-α extinction
    /// profile of vertical optical depth β.
    pub fn reference_link(altitude: f64, zenith: f64) -> Result<Self> {
        Self {
            altitude,
            zenith,
            wavelength: reference::WAVELENGTH,
            w_d: reference::W_D,
            a_r: reference::A_R,
            chi_ext: 1.0,
        }
        .relocated(altitude, zenith, Extinction::default())
    }

    /// Same optics moved to another altitude and zenith angle, with χ_ext
    /// re-derived from `extinction`.
    pub fn relocated(&self, altitude: f64, zenith: f64, extinction: Extinction) -> Result<Self> {
        let mut g = Self {
            altitude,
            zenith,
            ..*self
        };
        g.validate_path()?;
        g.chi_ext = match extinction {
            Extinction::VerticalDepth(depth) => atm_transmissivity(
                &ExtinctionProfile::zenith_optical_depth(depth, altitude),
                &g,
            )?,
            Extinction::Fixed(chi) => chi,
        };
        g.validate()?;
        Ok(g)
    }

    /// Same geometry with χ_ext recomputed from `profile`.
    pub fn with_extinction(mut self, profile: &ExtinctionProfile) -> Result<Self> {
        self.chi_ext = atm_transmissivity(profile, &self)?;
        Ok(self)
    }

    /// Straight-ray path length h̄ / cos φ, m.
    pub fn path_length(&self) -> f64 {
        self.altitude / self.zenith.cos()
    }

    pub fn within_low_altitude_range(&self) -> bool {
        self.altitude >= LOW_ALTITUDE_RANGE.0 && self.altitude <= LOW_ALTITUDE_RANGE.1
    }

    pub(crate) fn validate_path(&self) -> Result<()> {
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "altitude must be positive, got {}",
                self.altitude
            )));
        }
        if !(self.zenith >= 0.0 && self.zenith < MAX_ZENITH_DEG.to_radians()) {
            return Err(Error::ZenithOutOfRange {
                zenith_deg: self.zenith.to_degrees(),
                max_deg: MAX_ZENITH_DEG,
            });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_path()?;
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("w_d", self.w_d),
            ("a_r", self.a_r),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.chi_ext > 0.0 && self.chi_ext <= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "chi_ext must lie in (0, 1], got {}",
                self.chi_ext
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_geometry_extinction_follows_secant() {
        let g = ChannelGeometry::reference_link(30.0, 0.0).unwrap();
        assert_relative_eq!(g.chi_ext, (-0.7f64).exp(), max_relative = 1e-10);
        let g = ChannelGeometry::reference_link(220.0, 60f64.to_radians()).unwrap();
        assert_relative_eq!(g.chi_ext, (-1.4f64).exp(), max_relative = 1e-10);
        assert_relative_eq!(g.path_length(), 440.0, max_relative = 1e-12);
        g.validate().unwrap();
    }

    #[test]
    fn geometry_validation() {
        assert!(ChannelGeometry::reference_link(0.0, 0.0).is_err());
        assert!(matches!(
            ChannelGeometry::reference_link(100.0, 1.6),
            Err(Error::ZenithOutOfRange { .. })
        ));
        let mut g = ChannelGeometry::reference_link(100.0, 0.0).unwrap();
        g.chi_ext = 1.5;
        assert!(g.validate().is_err());
        assert!(!ChannelGeometry::reference_link(300.0, 0.0).unwrap().within_low_altitude_range());
        assert!(ChannelGeometry::reference_link(18.5, 0.0).unwrap().within_low_altitude_range());
    }
}
