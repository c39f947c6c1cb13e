//! Altitude profiles of the refractive-index structure constant C_n²(h)
//! and the derived turbulence quantities used by the beam models.
//!
//! The two SLC-D variants are piecewise power laws. At a branch boundary the
//! lower-altitude branch applies, so every branch is the half-open interval
//! `(lower, upper]`.
//!
//! The Hufnagel–Valley and Fried expressions are the standard literature
//! forms, not fitted here:
//!
//! * HV: `0.00594 (v/27)² (1e-5 h)^10 e^{-h/1000} + 2.7e-16 e^{-h/1500} + 1.7e-14 e^{-h/100}`
//! * Fried: `K₀ h^{-1/3} e^{-h/3200}`

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// Kolmogorov spectrum prefactor.
pub const KOLMOGOROV_CONSTANT: f64 = 0.033;

/// Scale height of the Fried profile, metres.
pub const FRIED_SCALE_HEIGHT: f64 = 3200.0;

/// Named C_n² altitude model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TurbulenceModel {
    SlcdDay,
    SlcdNightVariant,
    /// Hufnagel–Valley, parameterized by the rms upper-altitude wind speed (m/s).
    Hvb { wind_speed: f64 },
    /// Fried short-range model, parameterized by the strength parameter K₀.
    Fried { k0: f64 },
}

// (upper bound of branch, coefficient, exponent): C_n² = coeff / h^exp
type Branch = (f64, f64, f64);

const SLCD_DAY: [Branch; 5] = [
    (18.5, 1.70e-14, 0.0),
    (240.0, 3.13e-13, 1.0),
    (880.0, 1.30e-15, 0.0),
    (7200.0, 8.87e-7, 3.0),
    (20000.0, 2.00e-16, 0.5),
];

const SLCD_NIGHT: [Branch; 5] = [
    (19.0, 0.0, 0.0),
    (230.0, 4.008e-13, 1.054),
    (850.0, 1.30e-15, 0.0),
    (7000.0, 6.352e-7, 2.966),
    (20000.0, 6.209e-16, 0.6229),
];

fn piecewise(branches: &[Branch], h: f64) -> f64 {
    let &(_, coeff, exp) = branches
        .iter()
        .find(|(upper, _, _)| h <= *upper)
        .unwrap_or(&branches[branches.len() - 1]);
    if exp == 0.0 {
        coeff
    } else {
        coeff / h.powf(exp)
    }
}

impl TurbulenceModel {
    /// CLI/config name of the model.
    pub fn name(&self) -> &'static str {
        match self {
            TurbulenceModel::SlcdDay => "slcd-day",
            TurbulenceModel::SlcdNightVariant => "slcd-night-variant",
            TurbulenceModel::Hvb { .. } => "hvb",
            TurbulenceModel::Fried { .. } => "fried",
        }
    }

    /// Altitudes `(min, max]` on which the model is defined, in metres.
    pub fn valid_altitude_range(&self) -> (f64, f64) {
        match self {
            TurbulenceModel::SlcdDay | TurbulenceModel::SlcdNightVariant => (0.0, 20_000.0),
            TurbulenceModel::Hvb { .. } => (0.0, 30_000.0),
            TurbulenceModel::Fried { .. } => (0.0, 20_000.0),
        }
    }

    /// Builds a model from its name plus the optional parameters.
    pub fn from_name(name: &str, wind_speed: Option<f64>, k0: Option<f64>) -> Result<Self> {
        let model = match name {
            "slcd-day" => TurbulenceModel::SlcdDay,
            "slcd-night-variant" => TurbulenceModel::SlcdNightVariant,
            "hvb" => TurbulenceModel::Hvb {
                wind_speed: wind_speed.unwrap_or(21.0),
            },
            "fried" => TurbulenceModel::Fried {
                k0: k0.ok_or(Error::InvalidParameter {
                    name: "k0",
                    value: f64::NAN,
                    reason: "the fried model needs an explicit K0",
                })?,
            },
            _ => {
                return Err(Error::InvalidParameter {
                    name: "model",
                    value: f64::NAN,
                    reason: "expected slcd-day, slcd-night-variant, hvb or fried",
                })
            }
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TurbulenceModel::Hvb { wind_speed } => {
                crate::error::non_negative("wind_speed", wind_speed)?;
            }
            TurbulenceModel::Fried { k0 } => {
                crate::error::non_negative("k0", k0)?;
            }
            _ => {}
        }
        Ok(())
    }

    /// C_n² at `altitude` metres, in m^{-2/3}.
    pub fn cn2(&self, altitude: f64) -> Result<f64> {
        let (min, max) = self.valid_altitude_range();
        if !(altitude > min && altitude <= max) {
            return Err(Error::AltitudeOutOfRange {
                model: self.name(),
                altitude,
                min,
                max,
            });
        }
        let h = altitude;
        Ok(match *self {
            TurbulenceModel::SlcdDay => piecewise(&SLCD_DAY, h),
            TurbulenceModel::SlcdNightVariant => piecewise(&SLCD_NIGHT, h),
            TurbulenceModel::Hvb { wind_speed } => {
                0.00594 * (wind_speed / 27.0).powi(2) * (1e-5 * h).powi(10) * (-h / 1000.0).exp()
                    + 2.7e-16 * (-h / 1500.0).exp()
                    + 1.7e-14 * (-h / 100.0).exp()
            }
            TurbulenceModel::Fried { k0 } => k0 * h.powf(-1.0 / 3.0) * (-h / FRIED_SCALE_HEIGHT).exp(),
        })
    }
}

impl fmt::Display for TurbulenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TurbulenceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TurbulenceModel::from_name(s, None, None)
    }
}

/// Inertial range `1/L₀ < k < 1/l₀` in which the Kolmogorov spectrum holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertialRange {
    /// Outer scale L₀, metres.
    pub outer_scale: f64,
    /// Inner scale l₀, metres.
    pub inner_scale: f64,
}

impl Default for InertialRange {
    fn default() -> Self {
        Self {
            outer_scale: 1.0,
            inner_scale: 1e-3,
        }
    }
}

impl InertialRange {
    pub fn contains(&self, k: f64) -> bool {
        k > 1.0 / self.outer_scale && k < 1.0 / self.inner_scale
    }
}

/// Kolmogorov refractive-index spectrum `0.033 C_n² k^{-11/3}`.
///
/// The inertial-range condition is the caller's to check with
/// [`InertialRange::contains`].
pub fn kolmogorov_spectrum(cn2: f64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    Ok(KOLMOGOROV_CONSTANT * cn2 * k.powf(-11.0 / 3.0))
}

/// Optical wavenumber `2π/λ`.
pub fn wavenumber(wavelength: f64) -> f64 {
    2.0 * PI / wavelength
}

/// Rytov variance σ_R² = 1.23 C_n² k^{7/6} z^{11/6}.
pub fn rytov_sq(cn2: f64, wavelength: f64, z: f64) -> Result<f64> {
    positive("wavelength", wavelength)?;
    if !(z > 0.0) {
        return Err(Error::ZeroDistance(z));
    }
    crate::error::non_negative("cn2", cn2)?;
    let k = wavenumber(wavelength);
    Ok(1.23 * cn2 * k.powf(7.0 / 6.0) * z.powf(11.0 / 6.0))
}

/// Fresnel number Ω = k w_D² / (2z).
pub fn fresnel(wavelength: f64, w_d: f64, z: f64) -> Result<f64> {
    positive("wavelength", wavelength)?;
    positive("w_d", w_d)?;
    if !(z > 0.0) {
        return Err(Error::ZeroDistance(z));
    }
    Ok(wavenumber(wavelength) * w_d * w_d / (2.0 * z))
}

/// Rytov variance, Fresnel number and wavenumber for one propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurbulenceDerived {
    pub rytov_sq: f64,
    pub fresnel: f64,
    pub wavenumber: f64,
}

impl TurbulenceDerived {
    pub fn new(cn2: f64, wavelength: f64, w_d: f64, z: f64) -> Result<Self> {
        Ok(Self {
            rytov_sq: rytov_sq(cn2, wavelength, z)?,
            fresnel: fresnel(wavelength, w_d, z)?,
            wavenumber: wavenumber(wavelength),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn slcd_day_reference_points() {
        let m = TurbulenceModel::SlcdDay;
        assert_eq!(m.cn2(10.0).unwrap(), 1.70e-14);
        assert_relative_eq!(m.cn2(100.0).unwrap(), 3.13e-15, max_relative = 1e-14);
        assert_eq!(m.cn2(500.0).unwrap(), 1.30e-15);
        assert_relative_eq!(m.cn2(1000.0).unwrap(), 8.87e-16, max_relative = 1e-14);
        assert_relative_eq!(m.cn2(10_000.0).unwrap(), 2.0e-18, max_relative = 1e-14);
    }

    #[test]
    fn slcd_night_reference_points() {
        let m = TurbulenceModel::SlcdNightVariant;
        assert_eq!(m.cn2(10.0).unwrap(), 0.0);
        let v = m.cn2(100.0).unwrap();
        assert_relative_eq!(v, 4.008e-13 / 100f64.powf(1.054), max_relative = 1e-15);
        assert!((v - 3.12e-15).abs() < 0.01e-15);
    }

    #[test]
    fn boundary_ties_take_lower_branch() {
        let day = TurbulenceModel::SlcdDay;
        assert_eq!(day.cn2(18.5).unwrap(), 1.70e-14);
        assert_relative_eq!(day.cn2(240.0).unwrap(), 3.13e-13 / 240.0);
        assert_eq!(day.cn2(880.0).unwrap(), 1.30e-15);
        let night = TurbulenceModel::SlcdNightVariant;
        assert_eq!(night.cn2(19.0).unwrap(), 0.0);
        assert_eq!(night.cn2(850.0).unwrap(), 1.30e-15);
    }

    #[test]
    fn out_of_range_altitudes() {
        for m in [TurbulenceModel::SlcdDay, TurbulenceModel::SlcdNightVariant] {
            assert!(matches!(m.cn2(0.0), Err(Error::AltitudeOutOfRange { .. })));
            assert!(matches!(m.cn2(-3.0), Err(Error::AltitudeOutOfRange { .. })));
            assert!(matches!(m.cn2(20_000.1), Err(Error::AltitudeOutOfRange { .. })));
            assert!(m.cn2(f64::NAN).is_err());
        }
        assert!(m_ok(TurbulenceModel::SlcdDay.cn2(20_000.0)));
    }

    fn m_ok(r: Result<f64>) -> bool {
        r.map(|v| v.is_finite() && v >= 0.0).unwrap_or(false)
    }

    #[test]
    fn hvb_ground_value_and_wind_dependence() {
        let calm = TurbulenceModel::Hvb { wind_speed: 0.0 };
        let windy = TurbulenceModel::Hvb { wind_speed: 30.0 };
        // Near the ground the two exponential terms dominate.
        let v = calm.cn2(1e-6).unwrap();
        assert_relative_eq!(v, 1.7e-14 + 2.7e-16, max_relative = 1e-6);
        assert!(windy.cn2(10_000.0).unwrap() > calm.cn2(10_000.0).unwrap());
    }

    #[test]
    fn fried_scales_with_k0() {
        let a = TurbulenceModel::Fried { k0: 1e-14 }.cn2(100.0).unwrap();
        let b = TurbulenceModel::Fried { k0: 3e-14 }.cn2(100.0).unwrap();
        assert_relative_eq!(b, 3.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn model_names_round_trip() {
        for name in ["slcd-day", "slcd-night-variant", "hvb"] {
            assert_eq!(name.parse::<TurbulenceModel>().unwrap().name(), name);
        }
        assert!("fried".parse::<TurbulenceModel>().is_err());
        assert!(TurbulenceModel::from_name("fried", None, Some(1e-13)).is_ok());
        assert!("hv57".parse::<TurbulenceModel>().is_err());
        let json: TurbulenceModel = serde_json::from_str(r#"{"model":"hvb","wind_speed":21.0}"#).unwrap();
        assert_eq!(json, TurbulenceModel::Hvb { wind_speed: 21.0 });
        assert!(serde_json::from_str::<TurbulenceModel>(r#"{"model":"hvb","wind":21.0}"#).is_err());
    }

    #[test]
    fn kolmogorov_examples() {
        assert_eq!(kolmogorov_spectrum(1.0, 1.0).unwrap(), 0.033);
        assert_eq!(kolmogorov_spectrum(0.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(
            kolmogorov_spectrum(1e-14, 100.0).unwrap(),
            0.033e-14 * 100f64.powf(-11.0 / 3.0),
            max_relative = 1e-15
        );
        assert!(matches!(kolmogorov_spectrum(1.0, 0.0), Err(Error::NonPositiveWavenumber(_))));
        let range = InertialRange::default();
        assert!(range.contains(10.0));
        assert!(!range.contains(1.0));
        assert!(!range.contains(2000.0));
    }

    #[test]
    fn rytov_examples() {
        assert_eq!(rytov_sq(0.0, 800e-9, 1000.0).unwrap(), 0.0);
        // 1.23 * 1.28e-14 * (2π/800e-9)^(7/6) * 1000^(11/6), evaluated independently.
        let v = rytov_sq(1.28e-14, 800e-9, 1000.0).unwrap();
        assert_relative_eq!(v, 0.551_298_244_234_738_4, max_relative = 1e-12);
        let doubled = rytov_sq(1.28e-14, 800e-9, 2000.0).unwrap();
        assert_relative_eq!(doubled / v, 2f64.powf(11.0 / 6.0), max_relative = 1e-13);
        assert!(matches!(rytov_sq(1e-14, 800e-9, 0.0), Err(Error::ZeroDistance(_))));
    }

    #[test]
    fn fresnel_examples() {
        let v = fresnel(810e-9, 0.0115, 30.0).unwrap();
        assert_relative_eq!(v, PI * 0.0115f64.powi(2) / (810e-9 * 30.0), max_relative = 1e-14);
        assert_relative_eq!(fresnel(810e-9, 0.023, 30.0).unwrap(), 4.0 * v, max_relative = 1e-14);
        assert_relative_eq!(fresnel(810e-9, 0.0115, 60.0).unwrap(), 0.5 * v, max_relative = 1e-14);
        assert!(matches!(fresnel(810e-9, 0.01, 0.0), Err(Error::ZeroDistance(_))));
    }

    proptest! {
        #[test]
        fn slcd_profiles_finite_and_non_negative(h in 1e-3f64..20_000.0) {
            for m in [TurbulenceModel::SlcdDay, TurbulenceModel::SlcdNightVariant] {
                let v = m.cn2(h).unwrap();
                prop_assert!(v.is_finite() && v >= 0.0);
            }
        }

        #[test]
        fn slcd_day_non_increasing_within_branches(a in 1e-3f64..20_000.0, b in 1e-3f64..20_000.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let same_branch = SLCD_DAY.iter().position(|(u, _, _)| lo <= *u)
                == SLCD_DAY.iter().position(|(u, _, _)| hi <= *u);
            if same_branch {
                let m = TurbulenceModel::SlcdDay;
                prop_assert!(m.cn2(hi).unwrap() <= m.cn2(lo).unwrap());
            }
        }

        #[test]
        fn kolmogorov_strictly_decreasing(cn2 in 1e-17f64..1e-12, k1 in 1.0f64..1e3, dk in 1e-3f64..10.0) {
            prop_assert!(kolmogorov_spectrum(cn2, k1 + dk).unwrap() < kolmogorov_spectrum(cn2, k1).unwrap());
        }

        #[test]
        fn rytov_linear_in_cn2(cn2 in 1e-17f64..1e-12, c in 0.0f64..100.0, z in 1.0f64..1e4) {
            let base = rytov_sq(cn2, 810e-9, z).unwrap();
            prop_assert!((rytov_sq(c * cn2, 810e-9, z).unwrap() - c * base).abs() <= 1e-12 * c * base + 1e-300);
        }

        #[test]
        fn fresnel_times_distance_constant(z1 in 1.0f64..1e4, z2 in 1.0f64..1e4) {
            let a = fresnel(810e-9, 0.0115, z1).unwrap() * z1;
            let b = fresnel(810e-9, 0.0115, z2).unwrap() * z2;
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
