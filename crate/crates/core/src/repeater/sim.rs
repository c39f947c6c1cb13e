//! Discrete-event loop for the repeater chain.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{
    correct_pair, correct_qubit, qubit_fidelity, swap_uncorrected, teleport_uncorrected, BellState,
    BsmOutcomePolicy, Qubit, TwoQubitState,
};
use super::SwarmTopology;
use crate::elliptic::sample_stream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimingMode {
    /// Pairs are stored in memories before the run starts.
    #[default]
    PreShared,
    /// Pairs are distributed at the start, costing one photon flight per hop.
    RealTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOptions {
    pub timing: TimingMode,
    /// Memory dephasing time constant in ns. `None` disables decoherence.
    pub dephasing_time_ns: Option<f64>,
    pub bsm_policy: BsmOutcomePolicy,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            timing: TimingMode::PreShared,
            dephasing_time_ns: None,
            bsm_policy: BsmOutcomePolicy::Sample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time_ns: f64,
    pub node: String,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Fidelity of Bob's qubit with the input; 0 when the run failed.
    pub fidelity: f64,
    pub elapsed_time_ns: f64,
    /// False when a Bell measurement failed and the run was abandoned.
    pub success: bool,
    pub event_log: Vec<EventRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Action {
    PairReady { hop: usize },
    Swap { node: usize },
    SwapResult { node: usize, outcome: BellState },
    Herald,
    TeleportResult { outcome: BellState },
}

struct Scheduled {
    time: f64,
    seq: u64,
    action: Action,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // Reversed so the max-heap pops the earliest event, oldest first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.seq.cmp(&self.seq))
    }
}

struct Stored {
    state: TwoQubitState,
    since: f64,
}

struct Sim<'a> {
    topo: &'a SwarmTopology,
    opts: &'a SimOptions,
    input: &'a Qubit,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Scheduled>,
    seq: u64,
    log: Vec<EventRecord>,
    delay: f64,
    /// `hops[i]` joins node i and node i+1 (node 0 is Alice).
    hops: Vec<Option<Stored>>,
    /// Pair between Alice and the node that will receive the next swap
    /// result, awaiting correction.
    chain: Option<Stored>,
    bob: Option<Matrix2<Complex64>>,
}

impl<'a> Sim<'a> {
    fn node_name(&self, i: usize) -> String {
        match i {
            0 => "alice".into(),
            i if i == self.topo.n_repeaters + 1 => "bob".into(),
            i => format!("d{i}"),
        }
    }

    fn schedule(&mut self, time: f64, action: Action) {
        self.queue.push(Scheduled {
            time,
            seq: self.seq,
            action,
        });
        self.seq += 1;
    }

    fn record(&mut self, time: f64, node: usize, event: String) {
        self.log.push(EventRecord {
            time_ns: time,
            node: self.node_name(node),
            event,
        });
    }

    /// Let a stored pair dephase until `now`.
    fn age(&self, s: Stored, now: f64) -> Result<TwoQubitState> {
        match self.opts.dephasing_time_ns {
            Some(t) if now > s.since => {
                let q = 0.5 * (1.0 - (-(now - s.since) / t).exp());
                s.state.dephase(q)
            }
            _ => Ok(s.state),
        }
    }

    fn bsm_succeeds(&mut self) -> bool {
        let u: f64 = self.rng.gen();
        u < self.topo.per_hop_noise.bsm_success
    }

    fn fail(&mut self, time: f64, node: usize) -> SimResult {
        self.record(time, node, "bsm failed".into());
        SimResult {
            fidelity: 0.0,
            elapsed_time_ns: time,
            success: false,
            event_log: std::mem::take(&mut self.log),
        }
    }

    fn run(mut self) -> Result<SimResult> {
        let n = self.topo.n_repeaters;
        let start = match self.opts.timing {
            TimingMode::PreShared => 0.0,
            TimingMode::RealTime => self.delay,
        };
        for hop in 0..=n {
            self.schedule(start, Action::PairReady { hop });
        }
        if n == 0 {
            self.schedule(start, Action::Herald);
        } else {
            self.schedule(start, Action::Swap { node: 1 });
        }

        while let Some(Scheduled { time, action, .. }) = self.queue.pop() {
            match action {
                Action::PairReady { hop } => {
                    let p = self.topo.per_hop_noise.model.depolarizing_probability();
                    let state = TwoQubitState::bell(BellState::PhiPlus).depolarize(p)?;
                    self.hops[hop] = Some(Stored { state, since: time });
                    if hop == 0 {
                        self.chain = self.hops[0].take();
                    }
                    self.record(time, hop, format!("pair ready with {}", self.node_name(hop + 1)));
                }
                Action::Swap { node } => {
                    let left = self.chain.take().expect("chain pair present");
                    let right = self.hops[node].take().expect("hop pair present");
                    let (left, right) = (self.age(left, time)?, self.age(right, time)?);
                    if !self.bsm_succeeds() {
                        return Ok(self.fail(time, node));
                    }
                    let (state, outcome) =
                        swap_uncorrected(&left, &right, self.opts.bsm_policy, &mut self.rng)?;
                    state.validate()?;
                    self.chain = Some(Stored { state, since: time });
                    self.record(time, node, format!("swap {}", outcome.label()));
                    self.schedule(time + self.delay, Action::SwapResult { node: node + 1, outcome });
                }
                Action::SwapResult { node, outcome } => {
                    let s = self.chain.take().expect("chain pair present");
                    let state = correct_pair(&self.age(s, time)?, outcome);
                    state.validate()?;
                    self.chain = Some(Stored { state, since: time });
                    self.record(time, node, format!("correct {}", outcome.label()));
                    if node <= n {
                        self.schedule(time, Action::Swap { node });
                    } else {
                        self.record(time, node, "herald sent".into());
                        self.schedule(time + self.delay * (n + 1) as f64, Action::Herald);
                    }
                }
                Action::Herald => {
                    let s = self.chain.take().expect("chain pair present");
                    let pair = self.age(s, time)?;
                    if n > 0 {
                        self.record(time, 0, "herald received".into());
                    }
                    if !self.bsm_succeeds() {
                        return Ok(self.fail(time, 0));
                    }
                    let (rho, outcome) =
                        teleport_uncorrected(self.input, &pair, self.opts.bsm_policy, &mut self.rng)?;
                    self.bob = Some(rho);
                    self.record(time, 0, format!("teleport {}", outcome.label()));
                    self.schedule(
                        time + self.delay * (n + 1) as f64,
                        Action::TeleportResult { outcome },
                    );
                }
                Action::TeleportResult { outcome } => {
                    let rho = correct_qubit(&self.bob.take().expect("bob qubit present"), outcome);
                    let fidelity = qubit_fidelity(&rho, self.input)?;
                    self.record(time, n + 1, format!("correct {}", outcome.label()));
                    return Ok(SimResult {
                        fidelity,
                        elapsed_time_ns: time,
                        success: true,
                        event_log: self.log,
                    });
                }
            }
        }
        unreachable!("the protocol always ends in a teleport result or a failure")
    }
}

/// Teleport `input` from Alice to Bob with default options.
pub fn run_teleportation(topology: &SwarmTopology, input: &Qubit, seed: u64) -> Result<SimResult> {
    run_teleportation_with(topology, input, &SimOptions::default(), seed)
}

pub fn run_teleportation_with(
    topology: &SwarmTopology,
    input: &Qubit,
    options: &SimOptions,
    seed: u64,
) -> Result<SimResult> {
    run_stream(topology, input, options, sample_stream(seed, 0))
}

fn run_stream(
    topology: &SwarmTopology,
    input: &Qubit,
    options: &SimOptions,
    rng: ChaCha8Rng,
) -> Result<SimResult> {
    topology.validate()?;
    input
        .check_normalized()
        .map_err(|e| Error::InvalidState(e.to_string()))?;
    if let Some(t) = options.dephasing_time_ns {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dephasing_time_ns",
                value: t,
                reason: "must be positive",
            });
        }
    }
    let n = topology.n_repeaters;
    Sim {
        topo: topology,
        opts: options,
        input,
        rng,
        queue: BinaryHeap::new(),
        seq: 0,
        log: Vec::new(),
        delay: topology.hop_delay_ns(),
        hops: (0..=n).map(|_| None).collect(),
        chain: None,
        bob: None,
    }
    .run()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityStats {
    pub repetitions: usize,
    /// Mean fidelity over all runs, failed runs counting as 0.
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    pub success_rate: f64,
    pub mean_elapsed_ns: f64,
}

/// Independent runs on streams `(seed, 0..repetitions)`.
pub fn run_repetitions(
    topology: &SwarmTopology,
    input: &Qubit,
    options: &SimOptions,
    repetitions: usize,
    seed: u64,
) -> Result<FidelityStats> {
    if repetitions == 0 {
        return Err(Error::EmptyInput);
    }
    let runs = (0..repetitions as u64)
        .into_par_iter()
        .map(|i| run_stream(topology, input, options, sample_stream(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let n = repetitions as f64;
    let f: Vec<f64> = runs.iter().map(|r| r.fidelity).collect();
    let mean = f.iter().sum::<f64>() / n;
    let var = if repetitions > 1 {
        f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(FidelityStats {
        repetitions,
        mean_fidelity: mean,
        std_fidelity: var.sqrt(),
        min_fidelity: f.iter().copied().fold(f64::INFINITY, f64::min),
        max_fidelity: f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        success_rate: runs.iter().filter(|r| r.success).count() as f64 / n,
        mean_elapsed_ns: runs.iter().map(|r| r.elapsed_time_ns).sum::<f64>() / n,
    })
}
