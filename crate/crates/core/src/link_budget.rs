//! Classical optical link budget.
//!
//! The margin is the received power above receiver sensitivity:
//!
//! ```text
//! M = P_t − A_tx − 20·log₁₀(√2·L·θ/D) − A_rx − α_fog·L − S_r
//! ```
//!
//! `L` enters the geometric term in metres and the fog term in kilometres.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudgetSpec {
    /// Transmitted power, dBm.
    pub p_t: f64,
    /// Transmitter coupling loss, dB.
    pub a_tx: f64,
    /// Receiver coupling loss, dB.
    pub a_rx: f64,
    /// Half-angle divergence, rad.
    pub theta_div: f64,
    /// Receiver aperture diameter, m.
    pub d_rx: f64,
    /// Fog attenuation, dB/km.
    pub alpha_fog: f64,
    /// Receiver sensitivity, dBm.
    pub s_r: f64,
    /// Link range, km.
    pub range: f64,
}

impl LinkBudgetSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta_div", self.theta_div),
            ("d_rx", self.d_rx),
            ("range", self.range),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveGeometry(format!("{name} = {v}")));
            }
        }
        for (name, v) in [
            ("p_t", self.p_t),
            ("a_tx", self.a_tx),
            ("a_rx", self.a_rx),
            ("alpha_fog", self.alpha_fog),
            ("s_r", self.s_r),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    /// Geometric spreading loss in dB. Zero when the spot diameter equals
    /// the aperture.
    pub fn geometric_loss_db(&self) -> f64 {
        20.0 * (std::f64::consts::SQRT_2 * self.range * 1e3 * self.theta_div / self.d_rx).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkMargin {
    pub margin_db: f64,
    /// False when the margin is negative.
    pub operational: bool,
}

pub fn link_margin(spec: &LinkBudgetSpec) -> Result<LinkMargin> {
    spec.validate()?;
    let margin_db = spec.p_t - spec.a_tx - spec.geometric_loss_db() - spec.a_rx
        - spec.alpha_fog * spec.range
        - spec.s_r;
    Ok(LinkMargin {
        margin_db,
        operational: margin_db >= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginRow {
    pub diameter: f64,
    /// One margin per range, in the order the ranges were given.
    pub margins_db: Vec<f64>,
    /// Range at which the margin crosses zero, interpolated linearly
    /// between the bracketing grid points.
    pub break_even_range: Option<f64>,
    /// False when every margin in the row is negative.
    pub operational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginTable {
    pub ranges: Vec<f64>,
    pub rows: Vec<MarginRow>,
}

impl MarginTable {
    pub fn margin(&self, range_index: usize, diameter_index: usize) -> f64 {
        self.rows[diameter_index].margins_db[range_index]
    }
}

fn break_even(ranges: &[f64], margins: &[f64]) -> Option<f64> {
    ranges.windows(2).zip(margins.windows(2)).find_map(|(r, m)| {
        if m[0] == 0.0 {
            Some(r[0])
        } else if (m[0] > 0.0) != (m[1] > 0.0) || m[1] == 0.0 {
            Some(r[0] + (r[1] - r[0]) * m[0] / (m[0] - m[1]))
        } else {
            None
        }
    })
}

/// Margin over a range × diameter grid. `template.range` and
/// `template.d_rx` are replaced by the grid values.
pub fn margin_sweep(
    template: &LinkBudgetSpec,
    ranges: &[f64],
    diameters: &[f64],
) -> Result<MarginTable> {
    if ranges.is_empty() || diameters.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = diameters
        .par_iter()
        .map(|&d_rx| {
            let margins_db = ranges
                .iter()
                .map(|&range| {
                    link_margin(&LinkBudgetSpec {
                        range,
                        d_rx,
                        ..*template
                    })
                    .map(|m| m.margin_db)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MarginRow {
                diameter: d_rx,
                break_even_range: break_even(ranges, &margins_db),
                operational: margins_db.iter().any(|&m| m >= 0.0),
                margins_db,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MarginTable {
        ranges: ranges.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec() -> LinkBudgetSpec {
        LinkBudgetSpec {
            p_t: 10.0,
            a_tx: 1.0,
            a_rx: 1.0,
            theta_div: 1e-3,
            d_rx: 0.1,
            alpha_fog: 1.0,
            s_r: -40.0,
            range: 1.0,
        }
    }

    #[test]
    fn reference_margin() {
        let oracle = 10.0 - 1.0 - 20.0 * (2f64.sqrt() * 1000.0 * 1e-3 / 0.1).log10() - 1.0 - 1.0 + 40.0;
        let m = link_margin(&spec()).unwrap();
        assert_relative_eq!(m.margin_db, oracle, epsilon = 1e-12);
        assert_relative_eq!(m.margin_db, 23.989_700_043_360_187, epsilon = 1e-12);
        assert!(m.operational);
    }

    #[test]
    fn unit_geometric_term() {
        let s = LinkBudgetSpec {
            d_rx: 2f64.sqrt() * 1000.0 * 1e-3,
            ..spec()
        };
        assert!(s.geometric_loss_db().abs() < 1e-12);
    }

    #[test]
    fn diameter_doubling() {
        let a = link_margin(&spec()).unwrap().margin_db;
        let b = link_margin(&LinkBudgetSpec { d_rx: 0.2, ..spec() }).unwrap().margin_db;
        assert_relative_eq!(b - a, 20.0 * 2f64.log10(), epsilon = 1e-9);
    }

    #[test]
    fn negative_margin_is_not_an_error() {
        let m = link_margin(&LinkBudgetSpec { alpha_fog: 100.0, ..spec() }).unwrap();
        assert!(m.margin_db < 0.0);
        assert!(!m.operational);
    }

    #[test]
    fn rejects_bad_geometry() {
        for s in [
            LinkBudgetSpec { range: 0.0, ..spec() },
            LinkBudgetSpec { d_rx: -0.1, ..spec() },
            LinkBudgetSpec { theta_div: 0.0, ..spec() },
        ] {
            assert!(matches!(link_margin(&s), Err(Error::NonPositiveGeometry(_))));
        }
        assert!(link_margin(&LinkBudgetSpec { p_t: f64::NAN, ..spec() }).is_err());
    }

    #[test]
    fn sweep_single_cell() {
        let t = margin_sweep(&spec(), &[1.0], &[0.1]).unwrap();
        assert_eq!(t.margin(0, 0), link_margin(&spec()).unwrap().margin_db);
        assert!(margin_sweep(&spec(), &[], &[0.1]).is_err());
    }

    #[test]
    fn sweep_break_even() {
        let s = LinkBudgetSpec { alpha_fog: 10.0, ..spec() };
        let ranges = [1.0, 2.0, 3.0, 4.0, 5.0];
        let t = margin_sweep(&s, &ranges, &[0.1]).unwrap();
        let row = &t.rows[0];
        let m = &row.margins_db;
        let k = m.iter().position(|&v| v < 0.0).unwrap();
        let oracle = ranges[k - 1] + (ranges[k] - ranges[k - 1]) * m[k - 1] / (m[k - 1] - m[k]);
        assert_eq!(row.break_even_range, Some(oracle));
        assert!(row.operational);
    }

    #[test]
    fn sweep_flags_dead_rows() {
        let s = LinkBudgetSpec { s_r: 40.0, ..spec() };
        let t = margin_sweep(&s, &[1.0, 2.0], &[0.1, 0.2]).unwrap();
        assert!(t.rows.iter().all(|r| !r.operational && r.break_even_range.is_none()));
    }

    proptest! {
        #[test]
        fn decreasing_in_range(l in 0.01f64..50.0, dl in 1e-3f64..10.0, alpha in 0.0f64..50.0) {
            let a = link_margin(&LinkBudgetSpec { range: l, alpha_fog: alpha, ..spec() }).unwrap().margin_db;
            let b = link_margin(&LinkBudgetSpec { range: l + dl, alpha_fog: alpha, ..spec() }).unwrap().margin_db;
            prop_assert!(b < a);
        }

        #[test]
        fn increasing_in_diameter(d in 0.01f64..2.0, dd in 1e-3f64..1.0) {
            let a = link_margin(&LinkBudgetSpec { d_rx: d, ..spec() }).unwrap().margin_db;
            let b = link_margin(&LinkBudgetSpec { d_rx: d + dd, ..spec() }).unwrap().margin_db;
            prop_assert!(b > a);
        }

        #[test]
        fn linear_in_power_terms(dp in -20.0f64..20.0) {
            let base = link_margin(&spec()).unwrap().margin_db;
            let m = |s: LinkBudgetSpec| link_margin(&s).unwrap().margin_db;
            let deltas = [
                m(LinkBudgetSpec { p_t: 10.0 + dp, ..spec() }) - base,
                m(LinkBudgetSpec { a_tx: 1.0 + dp, ..spec() }) - base,
                m(LinkBudgetSpec { a_rx: 1.0 + dp, ..spec() }) - base,
                m(LinkBudgetSpec { s_r: -40.0 + dp, ..spec() }) - base,
            ];
            for (d, sign) in deltas.iter().zip([1.0, -1.0, -1.0, -1.0]) {
                prop_assert!((d - sign * dp).abs() < 1e-9);
            }
        }
    }
}
