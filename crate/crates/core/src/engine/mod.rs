//! Round-by-round protocol engines.
//!
//! Each engine mutates a private copy of the deployed nodes. Randomness comes
//! from a single ChaCha8 stream per run and is consumed only by the election
//! step, one draw per alive node in ascending id order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::election::{ElectionParams, Heterogeneity};
use crate::error::{ConfigError, SimError};
use crate::metrics::{record_round, RoundRecord};
use crate::model::{deploy, Network, Node, NodeId, PopulationConfig, RegionConfig};
use crate::radio::RadioParams;
use crate::rng::{stream_seed, SimRng};

pub mod invariants;
mod rounds;

pub use rounds::{
    join_or_defer, run_round_emeedp, run_round_leach, run_round_sep, select_relay, JoinDecision,
    SLEEP_ROUNDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Emeedp,
    Leach,
    Sep,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Emeedp, Protocol::Leach, Protocol::Sep];

    pub fn tag(self) -> &'static str {
        match self {
            Protocol::Emeedp => "emeedp",
            Protocol::Leach => "leach",
            Protocol::Sep => "sep",
        }
    }

    pub fn engine(self) -> Box<dyn ClusteringProtocol + Send> {
        match self {
            Protocol::Emeedp => Box::new(Emeedp),
            Protocol::Leach => Box::new(Leach),
            Protocol::Sep => Box::new(Sep),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Protocol {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                ConfigError::invalid("protocols", format!("unknown protocol `{s}` (expected emeedp, leach or sep)"))
            })
    }
}

/// Everything needed to deploy and simulate one network.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimConfig {
    pub region: RegionConfig,
    pub population: PopulationConfig,
    pub radio: RadioParams,
    pub election: ElectionParams,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.region.validate()?;
        self.population.validate()?;
        self.radio.validate()?;
        self.election.validate()
    }

    pub fn heterogeneity(&self) -> Heterogeneity {
        Heterogeneity {
            alpha: self.population.alpha,
            m_fraction: self.population.m_fraction,
        }
    }
}

/// Mutable per-run state handed to the round functions.
#[derive(Debug, Clone)]
pub struct SimState {
    pub nodes: Vec<Node>,
    pub region: RegionConfig,
    pub radio: RadioParams,
    pub election: ElectionParams,
    pub heterogeneity: Heterogeneity,
    /// When false, costs are computed but never deducted ("immortal" nodes).
    pub deduct_energy: bool,
}

impl SimState {
    pub fn new(network: &Network, config: &SimConfig) -> Self {
        Self {
            nodes: network.nodes.clone(),
            region: network.region,
            radio: config.radio,
            election: config.election,
            heterogeneity: config.heterogeneity(),
            deduct_energy: true,
        }
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn total_residual(&self) -> f64 {
        self.nodes.iter().map(|n| n.residual_energy).sum()
    }
}

/// Role partition of the alive nodes for one round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterAssignment {
    /// Confirmed cluster heads, ascending id.
    pub cluster_heads: Vec<NodeId>,
    /// Members of each cluster head, ascending id. Every head has an entry.
    pub members: BTreeMap<NodeId, Vec<NodeId>>,
    pub direct_transmitters: Vec<NodeId>,
    pub sleepers: Vec<NodeId>,
}

impl ClusterAssignment {
    pub fn ch_of(&self, member: NodeId) -> Option<NodeId> {
        self.members
            .iter()
            .find_map(|(&ch, m)| m.binary_search(&member).is_ok().then_some(ch))
    }

    pub fn is_head(&self, id: NodeId) -> bool {
        self.cluster_heads.binary_search(&id).is_ok()
    }

    pub fn member_count(&self) -> usize {
        self.members.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayDecision {
    pub ch_id: NodeId,
    pub relay_id: Option<NodeId>,
    pub d_ch_an: Option<f64>,
    pub d_an_bs: Option<f64>,
    pub d_ch_bs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub round: u32,
    pub assignment: ClusterAssignment,
    /// One entry per normal cluster head.
    pub relays: Vec<RelayDecision>,
    /// Energy actually deducted from each node this round, indexed by id.
    pub energy_spent: Vec<f64>,
    pub packets_delivered_to_bs: usize,
    pub deaths: Vec<NodeId>,
}

impl RoundOutcome {
    pub fn cluster_heads(&self) -> &[NodeId] {
        &self.assignment.cluster_heads
    }

    pub fn total_spent(&self) -> f64 {
        self.energy_spent.iter().sum()
    }

    pub fn relayed_count(&self) -> usize {
        self.relays.iter().filter(|r| r.relay_id.is_some()).count()
    }
}

/// Common interface of the three engines.
pub trait ClusteringProtocol {
    fn protocol(&self) -> Protocol;

    fn run_round(&mut self, state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Emeedp;

#[derive(Debug, Clone, Copy, Default)]
pub struct Leach;

#[derive(Debug, Clone, Copy, Default)]
pub struct Sep;

impl ClusteringProtocol for Emeedp {
    fn protocol(&self) -> Protocol {
        Protocol::Emeedp
    }

    fn run_round(&mut self, state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
        run_round_emeedp(state, round, rng)
    }
}

impl ClusteringProtocol for Leach {
    fn protocol(&self) -> Protocol {
        Protocol::Leach
    }

    fn run_round(&mut self, state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
        run_round_leach(state, round, rng)
    }
}

impl ClusteringProtocol for Sep {
    fn protocol(&self) -> Protocol {
        Protocol::Sep
    }

    fn run_round(&mut self, state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
        run_round_sep(state, round, rng)
    }
}

/// Complete history of one (protocol, seed) run.
#[derive(Debug, Clone)]
pub struct RunHistory {
    pub protocol: Protocol,
    pub seed: u64,
    pub network: Network,
    pub outcomes: Vec<RoundOutcome>,
    pub records: Vec<RoundRecord>,
}

impl RunHistory {
    pub fn n_nodes(&self) -> usize {
        self.network.nodes.len()
    }
}

/// A single simulation run that can be stepped round by round.
pub struct Simulation {
    protocol: Box<dyn ClusteringProtocol + Send>,
    state: SimState,
    rng: SimRng,
    network: Network,
    round: u32,
}

impl Simulation {
    /// Deploys the network for `seed` and seeds the run stream from
    /// `(seed, protocol tag)`.
    pub fn new(config: &SimConfig, protocol: Protocol, seed: u64) -> Result<Self, SimError> {
        config.validate()?;
        let network = deploy(&config.region, &config.population, seed)?;
        Ok(Self::with_network(network, config, protocol, stream_seed(seed, protocol.tag())))
    }

    pub fn with_network(network: Network, config: &SimConfig, protocol: Protocol, stream: u64) -> Self {
        Self {
            protocol: protocol.engine(),
            state: SimState::new(&network, config),
            rng: SimRng::seed_from_u64(stream),
            network,
            round: 0,
        }
    }

    /// Disables energy deduction; useful for measuring election rates.
    pub fn immortal(mut self) -> Self {
        self.state.deduct_energy = false;
        self
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn step(&mut self) -> Result<RoundOutcome, SimError> {
        let outcome = self.protocol.run_round(&mut self.state, self.round, &mut self.rng)?;
        self.round += 1;
        Ok(outcome)
    }

    /// Runs until every node is dead or `max_rounds` rounds have elapsed.
    pub fn run(mut self, max_rounds: u32) -> Result<RunHistory, SimError> {
        if max_rounds < 1 {
            return Err(ConfigError::invalid("max_rounds", "must be >= 1").into());
        }
        let mut outcomes = Vec::new();
        let mut records = Vec::new();
        while self.round < max_rounds && self.state.alive_count() > 0 {
            let outcome = self.step()?;
            records.push(record_round(&outcome, &self.state.nodes));
            outcomes.push(outcome);
        }
        Ok(RunHistory {
            protocol: self.protocol.protocol(),
            seed: self.network.rng_seed,
            network: self.network,
            outcomes,
            records,
        })
    }
}

impl Simulation {
    /// Like [`Simulation::run`] but keeps only the per-round records.
    pub fn run_records(mut self, max_rounds: u32) -> Result<(Network, Vec<RoundRecord>), SimError> {
        if max_rounds < 1 {
            return Err(ConfigError::invalid("max_rounds", "must be >= 1").into());
        }
        let mut records = Vec::new();
        while self.round < max_rounds && self.state.alive_count() > 0 {
            let outcome = self.step()?;
            records.push(record_round(&outcome, &self.state.nodes));
        }
        Ok((self.network, records))
    }
}

pub fn run_simulation(config: &SimConfig, protocol: Protocol, seed: u64, max_rounds: u32) -> Result<RunHistory, SimError> {
    Simulation::new(config, protocol, seed)?.run(max_rounds)
}

