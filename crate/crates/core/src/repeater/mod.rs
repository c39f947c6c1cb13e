//! Teleportation through a chain of drone repeaters.
//!
//! Alice and Bob are joined by `n + 1` hops with a Bell pair on each hop.
//! Repeaters D₁…Dₙ swap in order from Alice's side, each waiting for the
//! classical result of the previous swap. Once Bob holds the end of a pair
//! shared with Alice he tells her so, she teleports the input qubit and Bob
//! applies the Pauli correction when her two bits arrive.
//!
//! Pairs are tracked as two-qubit density operators, which is exact for the
//! sequential protocol with independent per-hop noise.

mod sim;
mod state;

pub use sim::{
    run_repetitions, run_teleportation, run_teleportation_with, EventRecord, FidelityStats,
    SimOptions, SimResult, TimingMode,
};
pub use state::{
    qubit_fidelity, swap_once, BellState, BsmOutcomePolicy, Qubit, TwoQubitState,
};

use serde::{Deserialize, Serialize};

use crate::elliptic::{sample_transmittances, LinkCondition};
use crate::error::{Error, Result};
use crate::geometry::ChannelGeometry;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Noise on the Bell pair of each hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum NoiseModel {
    Ideal,
    /// Two-qubit depolarizing channel with probability `p`.
    Depolarizing { p: f64 },
    /// Depolarizing with `p = 1 − eta`, `eta` being the mean channel
    /// transmittance of the hop.
    TransmittanceDriven { eta: f64 },
}

impl NoiseModel {
    /// Depolarizing probability applied to each fresh pair.
    pub fn depolarizing_probability(&self) -> f64 {
        match *self {
            NoiseModel::Ideal => 0.0,
            NoiseModel::Depolarizing { p } => p,
            NoiseModel::TransmittanceDriven { eta } => 1.0 - eta,
        }
    }

    /// Transmittance-driven noise from a Monte Carlo mean over the elliptic
    /// channel.
    pub fn from_channel(
        cond: &LinkCondition,
        geom: &ChannelGeometry,
        n_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::EmptyInput);
        }
        let t = sample_transmittances(cond, geom, n_samples, seed)?;
        Ok(NoiseModel::TransmittanceDriven {
            eta: t.iter().sum::<f64>() / n_samples as f64,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Ideal => Ok(()),
            NoiseModel::Depolarizing { p } => state::check_probability("p", p),
            NoiseModel::TransmittanceDriven { eta } => state::check_probability("eta", eta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    /// Probability that a Bell measurement succeeds.
    #[serde(default = "one")]
    pub bsm_success: f64,
}

fn one() -> f64 {
    1.0
}

impl NoiseSpec {
    pub fn ideal() -> Self {
        Self {
            model: NoiseModel::Ideal,
            bsm_success: 1.0,
        }
    }

    pub fn depolarizing(p: f64) -> Self {
        Self {
            model: NoiseModel::Depolarizing { p },
            bsm_success: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        state::check_probability("bsm_success", self.bsm_success)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmTopology {
    pub n_repeaters: usize,
    /// Length of each hop, km.
    pub hop_length: f64,
    /// Speed of classical messages, m/s.
    pub classical_signal_speed: f64,
    pub per_hop_noise: NoiseSpec,
}

impl SwarmTopology {
    pub fn new(n_repeaters: usize, hop_length: f64, per_hop_noise: NoiseSpec) -> Self {
        Self {
            n_repeaters,
            hop_length,
            classical_signal_speed: SPEED_OF_LIGHT,
            per_hop_noise,
        }
    }

    pub fn total_span(&self) -> f64 {
        (self.n_repeaters + 1) as f64 * self.hop_length
    }

    /// One-hop signalling delay in ns.
    pub fn hop_delay_ns(&self) -> f64 {
        self.hop_length * 1e3 / self.classical_signal_speed * 1e9
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hop_length > 0.0 && self.hop_length.is_finite()) {
            return Err(Error::InvalidTopology(format!(
                "hop_length = {}",
                self.hop_length
            )));
        }
        if !(self.classical_signal_speed > 0.0 && self.classical_signal_speed.is_finite()) {
            return Err(Error::InvalidTopology(format!(
                "classical_signal_speed = {}",
                self.classical_signal_speed
            )));
        }
        self.per_hop_noise
            .validate()
            .map_err(|e| Error::InvalidTopology(e.to_string()))
    }
}
