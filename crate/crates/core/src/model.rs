//! Network model: deployment region, base station, node population and
//! random uniform deployment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A 2-D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(self, other: Point) -> f64 {
        distance(self, other)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Square sensing field `[0, side_m]²` with a stationary base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub side_m: f64,
    pub bs_position: Point,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            side_m: 100.0,
            bs_position: Point::new(50.0, 50.0),
        }
    }
}

impl RegionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.side_m > 0.0 && self.side_m.is_finite()) {
            return Err(ConfigError::invalid("region.side_m", "must be > 0"));
        }
        if !self.contains(self.bs_position) {
            return Err(ConfigError::invalid(
                "region.bs_position",
                "must lie inside [0, side_m]²",
            ));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.side_m).contains(&p.x) && (0.0..=self.side_m).contains(&p.y)
    }
}

/// Two-level heterogeneous population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationConfig {
    pub n: usize,
    /// Fraction of advanced nodes.
    pub m_fraction: f64,
    /// Advanced nodes carry `alpha` times more energy than normal ones.
    pub alpha: f64,
    /// Initial energy of a normal node, joules.
    pub e0: f64,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        Self {
            n: 100,
            m_fraction: 0.1,
            alpha: 1.0,
            e0: 0.5,
        }
    }
}

impl PopulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 1 {
            return Err(ConfigError::invalid("population.n", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.m_fraction) {
            return Err(ConfigError::invalid(
                "population.m_fraction",
                "must be in [0, 1]",
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(ConfigError::invalid("population.alpha", "must be >= 0"));
        }
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(ConfigError::invalid("population.e0", "must be > 0"));
        }
        Ok(())
    }

    /// Number of advanced nodes: `n · m` rounded to nearest, ties up.
    pub fn advanced_count(&self) -> usize {
        let exact = self.n as f64 * self.m_fraction;
        ((exact + 0.5).floor() as usize).min(self.n)
    }

    pub fn advanced_energy(&self) -> f64 {
        self.e0 * (1.0 + self.alpha)
    }
}

/// Total initial energy of the network, `N · E0 · (1 + α·m)`.
pub fn total_initial_energy(pop: &PopulationConfig) -> f64 {
    pop.n as f64 * pop.e0 * (1.0 + pop.alpha * pop.m_fraction)
}

/// Mean cluster-head-to-BS distance for a square field of side `M`: `0.765 · M / 2`.
pub fn avg_distance_to_bs(region: &RegionConfig) -> f64 {
    0.765 * (region.side_m / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Normal,
    Advanced,
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: Point,
    pub initial_energy: f64,
    pub residual_energy: f64,
    pub alive: bool,
    pub sleep_rounds_remaining: u32,
    /// Consecutive rounds spent neither as CH nor as a cluster member.
    pub uncovered_rounds: u32,
    pub in_g_set: bool,
    /// Rounds since the node last served as CH; `None` if it never has.
    pub rounds_since_ch: Option<u32>,
}

impl Node {
    fn new(id: NodeId, kind: NodeKind, position: Point, energy: f64) -> Self {
        Self {
            id,
            kind,
            position,
            initial_energy: energy,
            residual_energy: energy,
            alive: true,
            sleep_rounds_remaining: 0,
            uncovered_rounds: 0,
            in_g_set: true,
            rounds_since_ch: None,
        }
    }

    pub fn is_advanced(&self) -> bool {
        self.kind == NodeKind::Advanced
    }

    pub fn is_asleep(&self) -> bool {
        self.sleep_rounds_remaining > 0
    }
}

/// A deployed network. Immutable once built; engines work on their own copy
/// of `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub region: RegionConfig,
    pub nodes: Vec<Node>,
    pub rng_seed: u64,
}

impl Network {
    pub fn total_initial_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.initial_energy).sum()
    }
}

/// Deploys `pop.n` nodes uniformly at random over the region.
///
/// Positions are drawn from a ChaCha8 stream seeded with `seed`, x then y,
/// in ascending id order. The first `round(n·m)` ids are the advanced nodes.
pub fn deploy(
    region: &RegionConfig,
    pop: &PopulationConfig,
    seed: u64,
) -> Result<Network, ConfigError> {
    region.validate()?;
    pop.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let advanced = pop.advanced_count();
    let nodes = (0..pop.n)
        .map(|id| {
            let x = rng.random::<f64>() * region.side_m;
            let y = rng.random::<f64>() * region.side_m;
            let (kind, energy) = if id < advanced {
                (NodeKind::Advanced, pop.advanced_energy())
            } else {
                (NodeKind::Normal, pop.e0)
            };
            Node::new(id, kind, Point::new(x, y), energy)
        })
        .collect();

    Ok(Network {
        region: *region,
        nodes,
        rng_seed: seed,
    })
}
