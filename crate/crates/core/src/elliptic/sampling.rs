use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{BeamMoments, BeamParams, SemiAxisDistribution};
use crate::error::{Error, Result};

/// Independent random stream for Monte Carlo sample `index` under `seed`.
///
/// Streams depend only on `(seed, index)`, so results do not depend on how
/// samples are scheduled across threads.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const MAX_REJECTIONS: usize = 10_000;

/// Draws beam parameters matching a set of moments.
///
/// Every draw consumes the same five variates in the same order (two
/// centroid normals, two semi-axis normals, one uniform angle), which keeps
/// samples paired across geometries that share a seed.
#[derive(Debug, Clone)]
pub struct BeamSampler {
    centroid_sd: f64,
    mean: f64,
    distribution: SemiAxisDistribution,
    // lower Cholesky factor of the (log-space or linear) covariance
    chol: [[f64; 2]; 2],
    // per-component variance in log space (log-normal only)
    log_var: [f64; 2],
}

impl BeamSampler {
    pub fn new(moments: &BeamMoments, distribution: SemiAxisDistribution) -> Result<Self> {
        let mean = moments.mean_w_sq;
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mean_w_sq",
                value: mean,
                reason: "mean squared semi-axis must be positive",
            });
        }
        if !(moments.centroid_var >= 0.0 && moments.centroid_var.is_finite()) {
            return Err(Error::NegativeVariance {
                name: "centroid_var",
                value: moments.centroid_var,
            });
        }
        let cov = moments.cov_w_sq;
        let target = match distribution {
            SemiAxisDistribution::LogNormal => {
                let mut log_cov = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        let arg = 1.0 + cov[i][j] / (mean * mean);
                        if !(arg > 0.0) {
                            return Err(Error::NonPositiveDefiniteCovariance(format!(
                                "log-normal match needs 1 + cov/mean^2 > 0, got {arg}"
                            )));
                        }
                        log_cov[i][j] = arg.ln();
                    }
                }
                log_cov
            }
            SemiAxisDistribution::TruncatedNormal => cov,
        };
        let chol = cholesky2(target)?;
        let log_var = match distribution {
            SemiAxisDistribution::LogNormal => [target[0][0], target[1][1]],
            SemiAxisDistribution::TruncatedNormal => [0.0, 0.0],
        };
        Ok(Self {
            centroid_sd: moments.centroid_var.sqrt(),
            mean,
            distribution,
            chol,
            log_var,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BeamParams> {
        let gx: f64 = rng.sample(StandardNormal);
        let gy: f64 = rng.sample(StandardNormal);
        let x0 = self.centroid_sd * gx;
        let y0 = self.centroid_sd * gy;

        let (w1_sq, w2_sq) = match self.distribution {
            SemiAxisDistribution::LogNormal => {
                let (a, b) = self.correlated(rng);
                (
                    self.mean * (a - 0.5 * self.log_var[0]).exp(),
                    self.mean * (b - 0.5 * self.log_var[1]).exp(),
                )
            }
            SemiAxisDistribution::TruncatedNormal => {
                let mut tries = 0;
                loop {
                    let (a, b) = self.correlated(rng);
                    let (w1, w2) = (self.mean + a, self.mean + b);
                    if w1 > 0.0 && w2 > 0.0 {
                        break (w1, w2);
                    }
                    tries += 1;
                    if tries >= MAX_REJECTIONS {
                        return Err(Error::NonPositiveDefiniteCovariance(
                            "truncated normal rejected every draw; spread is too wide for the mean".into(),
                        ));
                    }
                }
            }
        };
        let theta = rng.gen::<f64>() * FRAC_PI_2;
        Ok(BeamParams {
            x0,
            y0,
            w1_sq,
            w2_sq,
            theta,
        })
    }

    fn correlated<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        let l = &self.chol;
        (l[0][0] * g1, l[1][0] * g1 + l[1][1] * g2)
    }
}

fn cholesky2(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let tol = 1e-12 * (m[0][0].abs() + m[1][1].abs());
    if m[0][0] < -tol || m[1][1] < -tol {
        return Err(Error::NonPositiveDefiniteCovariance(format!("{m:?}")));
    }
    let l11 = m[0][0].max(0.0).sqrt();
    let l21 = if l11 > 0.0 {
        m[1][0] / l11
    } else if m[1][0].abs() <= tol {
        0.0
    } else {
        return Err(Error::NonPositiveDefiniteCovariance(format!("{m:?}")));
    };
    let rem = m[1][1] - l21 * l21;
    if rem < -tol {
        return Err(Error::NonPositiveDefiniteCovariance(format!("{m:?}")));
    }
    Ok([[l11, 0.0], [l21, rem.max(0.0).sqrt()]])
}

/// Single draw of the beam parameters from the stream of `seed`.
pub fn sample_beam_params(
    moments: &BeamMoments,
    distribution: SemiAxisDistribution,
    seed: u64,
) -> Result<BeamParams> {
    BeamSampler::new(moments, distribution)?.sample(&mut sample_stream(seed, 0))
}
