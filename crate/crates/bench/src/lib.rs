//! Fixtures shared by the benchmarks.

use skyq::elliptic::{beam_moments, BeamParams, BeamSampler, LinkCondition, LinkDirection};
use skyq::elliptic::{sample_stream, SemiAxisDistribution};
use skyq::link_budget::LinkBudgetSpec;
use skyq::ChannelGeometry;

/// Reference downlink at `altitude` metres, straight overhead.
pub fn downlink(altitude: f64, daytime: bool) -> (LinkCondition, ChannelGeometry) {
    let cond = LinkCondition::reference(LinkDirection::Downlink, daytime);
    let geom = ChannelGeometry::reference_link(altitude, 0.0).expect("reference geometry");
    (cond, geom)
}

/// `n` beam realizations drawn from the reference downlink.
pub fn beams(altitude: f64, n: usize, seed: u64) -> Vec<BeamParams> {
    let (cond, geom) = downlink(altitude, true);
    let moments = beam_moments(&cond, &geom).expect("moments");
    let sampler = BeamSampler::new(&moments, SemiAxisDistribution::LogNormal).expect("sampler");
    let mut rng = sample_stream(seed, 0);
    (0..n).map(|_| sampler.sample(&mut rng).expect("sample")).collect()
}

pub fn budget(range: f64, d_rx: f64) -> LinkBudgetSpec {
    LinkBudgetSpec {
        p_t: 10.0,
        a_tx: 1.0,
        a_rx: 1.0,
        theta_div: 1e-3,
        d_rx,
        alpha_fog: 1.0,
        s_r: -40.0,
        range,
    }
}
