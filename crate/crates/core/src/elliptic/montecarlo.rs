//! Monte Carlo estimation of the transmittance distribution.

use rayon::prelude::*;
use serde::Serialize;

use super::{beam_moments, elliptic_transmittance, BeamSampler, LinkCondition};
use crate::error::{Error, Result};
use crate::geometry::{ChannelGeometry, Extinction};

/// Smallest sample count accepted by [`pdt`].
pub const MIN_PDT_SAMPLES: usize = 1000;

/// Transmittances are rounded to this many decimals before binning.
pub const PDT_DECIMALS: i32 = 5;

/// Transmittance of `n` independent beam draws, in sample order.
///
/// Sample `i` uses stream `(seed, i)`; the output is identical for any
/// thread count.
pub fn sample_transmittances(
    cond: &LinkCondition,
    geom: &ChannelGeometry,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let moments = beam_moments(cond, geom)?;
    let sampler = BeamSampler::new(&moments, cond.semi_axis_distribution)?;
    let (a_r, chi) = (geom.a_r, geom.chi_ext);
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let params = sampler.sample(&mut super::sample_stream(seed, i))?;
            elliptic_transmittance(&params, a_r, chi)
        })
        .collect()
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn round_decimals(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

/// Binned probability distribution of transmittance over [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdtHistogram {
    /// `bins + 1` ascending edges from 0 to 1.
    pub bin_edges: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Mean of the unrounded transmittances.
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

impl PdtHistogram {
    pub fn from_samples(samples: &[f64], bins: usize, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if bins == 0 {
            return Err(Error::InvalidParameter {
                name: "bins",
                value: 0.0,
                reason: "need at least one bin",
            });
        }
        let mut counts = vec![0u64; bins];
        for &t in samples {
            let r = round_decimals(t, PDT_DECIMALS);
            let idx = ((r * bins as f64).floor() as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let n = samples.len() as f64;
        let (mean, std_error) = mean_and_stderr(samples);
        Ok(Self {
            bin_edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            probabilities: counts.iter().map(|&c| c as f64 / n).collect(),
            n_samples: samples.len(),
            seed,
            mean,
            std_error,
        })
    }

    pub fn bins(&self) -> usize {
        self.probabilities.len()
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Index of the most probable bin (lowest index on ties).
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    pub fn mode_center(&self) -> f64 {
        let i = self.mode_bin();
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// Upper edge of the first bin at which the cumulative probability
    /// reaches `q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for (i, p) in self.probabilities.iter().enumerate() {
            acc += p;
            if acc >= q - 1e-12 {
                return self.bin_edges[i + 1];
            }
        }
        1.0
    }

    pub fn interquartile_range(&self) -> f64 {
        self.quantile(0.75) - self.quantile(0.25)
    }

    /// Probability mass of bins whose centres fall in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.bin_centers()
            .iter()
            .zip(&self.probabilities)
            .filter(|(c, _)| **c >= lo && **c <= hi)
            .map(|(_, p)| p)
            .sum()
    }

    /// Number of local maxima whose probability exceeds `min_prob`, with
    /// plateaus counted once.
    pub fn peak_count(&self, min_prob: f64) -> usize {
        let p = &self.probabilities;
        let mut peaks = 0;
        let mut i = 0;
        while i < p.len() {
            let mut j = i;
            while j + 1 < p.len() && p[j + 1] == p[i] {
                j += 1;
            }
            let left_lower = i == 0 || p[i - 1] < p[i];
            let right_lower = j + 1 == p.len() || p[j + 1] < p[j];
            if left_lower && right_lower && p[i] > min_prob {
                peaks += 1;
            }
            i = j + 1;
        }
        peaks
    }
}

/// Probability distribution of transmittance from `n_samples` beam draws.
pub fn pdt(
    cond: &LinkCondition,
    geom: &ChannelGeometry,
    n_samples: usize,
    bins: usize,
    seed: u64,
) -> Result<PdtHistogram> {
    if n_samples < MIN_PDT_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            reason: "a PDT needs at least 1000 samples",
        });
    }
    let samples = sample_transmittances(cond, geom, n_samples, seed)?;
    PdtHistogram::from_samples(&samples, bins, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceCell {
    pub altitude: f64,
    pub zenith: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// Mean transmittance over an altitude × zenith grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmittanceSurface {
    /// Row-major: altitudes outer, zeniths inner.
    pub cells: Vec<SurfaceCell>,
    pub n_samples: usize,
    pub seed: u64,
}

impl TransmittanceSurface {
    pub fn cell(&self, altitude_index: usize, zenith_index: usize, n_zeniths: usize) -> &SurfaceCell {
        &self.cells[altitude_index * n_zeniths + zenith_index]
    }
}

/// Monte Carlo mean transmittance at each `(altitude, zenith)` pair.
///
/// Every cell reuses the same per-sample streams, so neighbouring cells
/// differ only through the geometry.
pub fn transmittance_surface(
    cond: &LinkCondition,
    optics: &ChannelGeometry,
    extinction: Extinction,
    altitudes: &[f64],
    zeniths: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<TransmittanceSurface> {
    if altitudes.is_empty() || zeniths.is_empty() || n_samples == 0 {
        return Err(Error::EmptyInput);
    }
    let mut cells = Vec::with_capacity(altitudes.len() * zeniths.len());
    for &altitude in altitudes {
        for &zenith in zeniths {
            let geom = optics.relocated(altitude, zenith, extinction)?;
            let samples = sample_transmittances(cond, &geom, n_samples, seed)?;
            let (mean, std_error) = mean_and_stderr(&samples);
            cells.push(SurfaceCell {
                altitude,
                zenith,
                mean,
                std_error,
            });
        }
    }
    Ok(TransmittanceSurface {
        cells,
        n_samples,
        seed,
    })
}
