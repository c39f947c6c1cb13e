//! Gaussian-beam diffraction, capture efficiency, PLOB bound, divergence
//! loss and beam-wander bookkeeping.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// Wavefront curvature at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curvature {
    Collimated,
    /// Radius of curvature R₀, m.
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    /// Initial spot size w₀, m.
    pub w0: f64,
    /// Wavelength, m.
    pub wavelength: f64,
    pub curvature: Curvature,
}

impl GaussianBeam {
    pub fn new(w0: f64, wavelength: f64, curvature: Curvature) -> Result<Self> {
        positive("w0", w0)?;
        positive("wavelength", wavelength)?;
        if let Curvature::Radius(r) = curvature {
            if r == 0.0 || !r.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "radius_of_curvature",
                    value: r,
                    reason: "must be finite and non-zero; use Collimated for a flat wavefront",
                });
            }
        }
        Ok(Self {
            w0,
            wavelength,
            curvature,
        })
    }

    pub fn collimated(w0: f64, wavelength: f64) -> Result<Self> {
        Self::new(w0, wavelength, Curvature::Collimated)
    }

    /// z_R = π w₀² / λ.
    pub fn rayleigh_length(&self) -> f64 {
        PI * self.w0 * self.w0 / self.wavelength
    }

    /// Diffraction-broadened spot size w_D after `z` metres.
    pub fn spot_size(&self, z: f64) -> Result<f64> {
        crate::error::non_negative("z", z)?;
        let focus = match self.curvature {
            Curvature::Collimated => 1.0,
            Curvature::Radius(r) => 1.0 - z / r,
        };
        let spread = z / self.rayleigh_length();
        Ok(self.w0 * (focus * focus + spread * spread).sqrt())
    }
}

/// Fraction of a Gaussian beam of spot size `w_d` captured by an aperture
/// of radius `a_r`: `1 − exp(−2a_r²/w_d²)`.
pub fn diffraction_transmissivity(a_r: f64, w_d: f64) -> Result<f64> {
    let x = capture_ratio(a_r, w_d)?;
    Ok(-(-x).exp_m1())
}

/// Far-field approximation `2a_r²/w_d²` of [`diffraction_transmissivity`].
/// It bounds the exact value from above.
pub fn far_field_transmissivity(a_r: f64, w_d: f64) -> Result<f64> {
    capture_ratio(a_r, w_d)
}

fn capture_ratio(a_r: f64, w_d: f64) -> Result<f64> {
    positive("a_r", a_r)?;
    positive("w_d", w_d)?;
    Ok(2.0 * a_r * a_r / (w_d * w_d))
}

/// Far-field ratio above which the PLOB approximation is flagged.
pub const FAR_FIELD_REGIME_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlobBound {
    /// Secret bits per channel use.
    pub bits: f64,
    /// False when `2a_r²/w_d²` is not small and the approximation is poor.
    pub far_field: bool,
}

/// PLOB secret-key capacity in the far field, `(2/ln 2)(a_r²/w_d²)`.
pub fn plob_upper_bound(a_r: f64, w_d: f64) -> Result<PlobBound> {
    positive("w_d", w_d)?;
    crate::error::non_negative("a_r", a_r)?;
    let ratio = a_r * a_r / (w_d * w_d);
    Ok(PlobBound {
        bits: 2.0 / LN_2 * ratio,
        far_field: 2.0 * ratio <= FAR_FIELD_REGIME_LIMIT,
    })
}

/// Geometric (divergence) loss in dB for transmitter and receiver aperture
/// areas `a_t`, `a_r` (m²) over `z` metres.
pub fn divergence_loss_db(a_t: f64, a_r: f64, wavelength: f64, z: f64) -> Result<f64> {
    positive("a_t", a_t)?;
    positive("a_r", a_r)?;
    positive("wavelength", wavelength)?;
    positive("z", z)?;
    let coupling = (4.0 / PI).log10();
    Ok(-10.0 * (2.0 * coupling + (a_t * a_r / (wavelength * wavelength * z * z)).log10()))
}

/// Area of a circular aperture of diameter `d`.
pub fn aperture_area(d: f64) -> f64 {
    PI * d * d / 4.0
}

/// Overall link transmissivity η_D · η_eff · η_atm.
pub fn overall_transmissivity(eta_d: f64, eta_eff: f64, eta_atm: f64) -> Result<f64> {
    for (name, v) in [("eta_d", eta_d), ("eta_eff", eta_eff), ("eta_atm", eta_atm)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::FactorOutOfRange { name, value: v });
        }
    }
    Ok(eta_d * eta_eff * eta_atm)
}

/// Beam-wander variances at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WanderBudget {
    /// Pointing-error variance σ²_pe, m².
    pub var_pointing: f64,
    /// Turbulence-induced variance σ²_tb, m².
    pub var_turbulence: f64,
    pub var_total: f64,
    /// Long-term beam waist squared w²_lt, m².
    pub long_term_waist_sq: f64,
    /// Whether w²_lt ≥ σ²_tb ≥ σ²_pe.
    pub ordered: bool,
}

pub fn wander_budget(var_pe: f64, var_tb: f64, w_lt_sq: f64) -> Result<WanderBudget> {
    for (name, v) in [
        ("var_pointing", var_pe),
        ("var_turbulence", var_tb),
        ("long_term_waist_sq", w_lt_sq),
    ] {
        if !(v >= 0.0) {
            return Err(Error::NegativeVariance { name, value: v });
        }
    }
    Ok(WanderBudget {
        var_pointing: var_pe,
        var_turbulence: var_tb,
        var_total: var_pe + var_tb,
        long_term_waist_sq: w_lt_sq,
        ordered: w_lt_sq >= var_tb && var_tb >= var_pe,
    })
}

/// Weak-turbulence beam-wander formulas from the optics literature
/// (Andrews & Phillips), for a collimated beam and an infinite outer scale.
/// These are not part of the core channel model; they exist to produce
/// wander/waist curves when no measured values are available.
pub mod literature {
    use super::GaussianBeam;
    use crate::error::Result;
    use crate::turbulence::{rytov_sq, wavenumber};

    /// Turbulence-induced centroid variance ⟨r_c²⟩ = 2.42 C_n² z³ w₀^{-1/3}.
    pub fn turbulence_wander_variance(cn2: f64, z: f64, beam: &GaussianBeam) -> f64 {
        2.42 * cn2 * z.powi(3) * beam.w0.powf(-1.0 / 3.0)
    }

    /// Pointing-jitter variance (σ_θ z)² for an rms angular jitter σ_θ.
    pub fn pointing_variance(jitter_rad: f64, z: f64) -> f64 {
        (jitter_rad * z).powi(2)
    }

    /// Long-term spot size squared W² (1 + 1.33 σ_R² Λ^{5/6}), with
    /// Λ = 2z / (k W²) the receiver-plane Fresnel ratio.
    pub fn long_term_waist_sq(cn2: f64, z: f64, beam: &GaussianBeam) -> Result<f64> {
        let w = beam.spot_size(z)?;
        let lambda = 2.0 * z / (wavenumber(beam.wavelength) * w * w);
        let sr = rytov_sq(cn2, beam.wavelength, z)?;
        Ok(w * w * (1.0 + 1.33 * sr * lambda.powf(5.0 / 6.0)))
    }
}
