use std::f64::consts::PI;

use serde::Serialize;

use super::{CentroidVariance, LinkCondition, LinkDirection};
use crate::error::Result;
use crate::geometry::ChannelGeometry;
use crate::turbulence::TurbulenceDerived;

/// First and second moments of the beam parameters.
///
/// The centroid has zero mean in both axes; `centroid_var` is the common
/// variance ⟨x₀²⟩ = ⟨y₀²⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamMoments {
    pub centroid_var: f64,
    /// ⟨W₁²⟩ = ⟨W₂²⟩, m².
    pub mean_w_sq: f64,
    /// ⟨ΔW_i² ΔW_j²⟩, m⁴.
    pub cov_w_sq: [[f64; 2]; 2],
    pub rytov_sq: f64,
    pub fresnel: f64,
    /// Propagation distance z, m.
    pub path_length: f64,
    pub cn2: f64,
}

pub fn beam_moments(cond: &LinkCondition, geom: &ChannelGeometry) -> Result<BeamMoments> {
    cond.validate()?;
    geom.validate()?;
    let z = geom.path_length();
    let cn2 = cond.cn2_at(geom.altitude)?;
    let t = TurbulenceDerived::new(cn2, geom.wavelength, geom.w_d, z)?;
    let (sr, om) = (t.rytov_sq, t.fresnel);
    let wd2 = geom.w_d * geom.w_d;

    // (scattering coefficient, turbulence coefficient, covariance scale)
    let (scatter, turb, cov_scale) = match cond.direction {
        LinkDirection::Uplink => (PI / 8.0, 2.6, 1.0),
        LinkDirection::Downlink => (PI / 24.0, 1.6, 3.0 / 8.0),
    };
    let extinction = 1.0 + scatter * z * cond.n0 * wd2;
    let mean_w_sq = wd2 / (om * om) * (extinction + turb * sr * om.powf(5.0 / 6.0));
    let c = cov_scale * wd2 * wd2 / om.powf(19.0 / 6.0) * extinction * sr;
    let cov_w_sq = [[1.2 * c, -0.8 * c], [-0.8 * c, 1.2 * c]];

    let centroid_var = match cond.direction {
        LinkDirection::Uplink => 0.419 * sr * wd2 * om.powf(-7.0 / 6.0),
        LinkDirection::Downlink => match cond.centroid_variance {
            CentroidVariance::AsPrinted => cond.alpha_p * z,
            CentroidVariance::Squared => (cond.alpha_p * z).powi(2),
        },
    };

    Ok(BeamMoments {
        centroid_var,
        mean_w_sq,
        cov_w_sq,
        rytov_sq: sr,
        fresnel: om,
        path_length: z,
        cn2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{Cn2Source, LinkCondition};
    use crate::turbulence::TurbulenceModel;
    use approx::assert_relative_eq;

    #[test]
    fn no_turbulence_leaves_only_diffraction_and_scattering() {
        let mut cond = LinkCondition::reference(LinkDirection::Uplink, false);
        // The night profile vanishes below 19 m.
        cond.cn2 = Cn2Source::Profile(TurbulenceModel::SlcdNightVariant);
        let geom = ChannelGeometry::reference_link(15.0, 0.0).unwrap();
        let m = beam_moments(&cond, &geom).unwrap();
        assert_eq!(m.rytov_sq, 0.0);
        assert_eq!(m.centroid_var, 0.0);
        assert_eq!(m.cov_w_sq, [[0.0; 2]; 2]);
        let wd2 = geom.w_d * geom.w_d;
        let expected = wd2 / m.fresnel.powi(2) * (1.0 + PI / 8.0 * 15.0 * cond.n0 * wd2);
        assert_relative_eq!(m.mean_w_sq, expected, max_relative = 1e-15);
    }

    #[test]
    fn downlink_centroid_is_pointing_times_distance() {
        let cond = LinkCondition::reference(LinkDirection::Downlink, true);
        let geom = ChannelGeometry::reference_link(100.0, 0.0).unwrap();
        let m = beam_moments(&cond, &geom).unwrap();
        assert_relative_eq!(m.centroid_var, 2e-4, max_relative = 1e-15);
        let squared = LinkCondition {
            centroid_variance: CentroidVariance::Squared,
            ..cond
        };
        assert_relative_eq!(
            beam_moments(&squared, &geom).unwrap().centroid_var,
            4e-8,
            max_relative = 1e-12
        );
    }

    #[test]
    fn covariance_structure() {
        for dir in [LinkDirection::Uplink, LinkDirection::Downlink] {
            let cond = LinkCondition::reference(dir, true);
            let m = beam_moments(&cond, &ChannelGeometry::reference_link(120.0, 0.3).unwrap()).unwrap();
            assert_relative_eq!(m.cov_w_sq[0][1] / m.cov_w_sq[0][0], -0.8 / 1.2, max_relative = 1e-14);
            assert_eq!(m.cov_w_sq[0][1], m.cov_w_sq[1][0]);
            assert!(m.cov_w_sq[0][0] > 0.0);
        }
    }

    #[test]
    fn slant_path_lengthens_propagation() {
        let cond = LinkCondition::reference(LinkDirection::Downlink, false);
        let zen = ChannelGeometry::reference_link(100.0, 0.0).unwrap();
        let slant = ChannelGeometry::reference_link(100.0, 60f64.to_radians()).unwrap();
        let a = beam_moments(&cond, &zen).unwrap();
        let b = beam_moments(&cond, &slant).unwrap();
        assert_relative_eq!(b.path_length, 200.0, max_relative = 1e-12);
        assert!(b.mean_w_sq > a.mean_w_sq);
        assert!(b.centroid_var > a.centroid_var);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let cond = LinkCondition::reference(LinkDirection::Uplink, true);
        let mut geom = ChannelGeometry::reference_link(100.0, 0.0).unwrap();
        geom.w_d = 0.0;
        assert!(beam_moments(&cond, &geom).is_err());
        let bad = LinkCondition { n0: -1.0, ..cond };
        assert!(beam_moments(&bad, &ChannelGeometry::reference_link(100.0, 0.0).unwrap()).is_err());
    }
}
