//! Cluster-head election rules: the rotating-epoch threshold, weighted
//! probabilities for two-level heterogeneity, residual-energy scaled
//! probabilities, and overlap suppression between elected heads.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::model::{avg_distance_to_bs, distance, Node, NodeId, NodeKind, RegionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectionParams {
    pub p_opt: f64,
    pub cluster_radius_m: f64,
}

impl Default for ElectionParams {
    fn default() -> Self {
        Self {
            p_opt: 0.1,
            cluster_radius_m: 25.0,
        }
    }
}

impl ElectionParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.p_opt > 0.0 && self.p_opt < 1.0) {
            return Err(ConfigError::invalid("election.p_opt", "must be in (0, 1)"));
        }
        if !(self.cluster_radius_m > 0.0 && self.cluster_radius_m.is_finite()) {
            return Err(ConfigError::invalid(
                "election.cluster_radius_m",
                "must be > 0",
            ));
        }
        Ok(())
    }
}

/// Heterogeneity parameters the weighted rules need alongside [`ElectionParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heterogeneity {
    pub alpha: f64,
    pub m_fraction: f64,
}

impl Heterogeneity {
    fn energy_factor(self) -> f64 {
        1.0 + self.alpha * self.m_fraction
    }
}

/// Slack absorbed before taking the ceiling of `1/p`, so that e.g.
/// `1 / (0.1 / 1.1)` evaluates to an 11-round epoch rather than 12.
const EPOCH_EPS: f64 = 1e-9;

/// Integer epoch length `⌈1/p⌉` for a per-round probability `p`.
/// Returns `None` for `p <= 0` (the node is never elected).
pub fn epoch_length(p: f64) -> Option<u32> {
    if p <= 0.0 {
        return None;
    }
    let len = (1.0 / p - EPOCH_EPS).ceil();
    Some(len.clamp(1.0, u32::MAX as f64) as u32)
}

fn rotating_threshold(p: f64, round: u32, in_g: bool) -> f64 {
    if !in_g {
        return 0.0;
    }
    let Some(epoch) = epoch_length(p) else {
        return 0.0;
    };
    let denom = 1.0 - p * f64::from(round % epoch);
    if denom <= 0.0 {
        return 1.0;
    }
    (p / denom).clamp(0.0, 1.0)
}

/// Classic rotating threshold `p / (1 − p·(r mod ⌈1/p⌉))` for nodes still in G.
pub fn leach_threshold(p: f64, round: u32, in_g: bool) -> f64 {
    rotating_threshold(p, round, in_g)
}

/// Same rotating threshold, evaluated with a node's own probability `p_i`.
pub fn emeedp_threshold(p_i: f64, round: u32, in_g: bool) -> f64 {
    rotating_threshold(p_i, round, in_g)
}

/// Weighted per-class probabilities `(p_nrm, p_adv)`.
pub fn weighted_probabilities(e: &ElectionParams, h: Heterogeneity) -> (f64, f64) {
    let p_nrm = e.p_opt / h.energy_factor();
    (p_nrm, p_nrm * (1.0 + h.alpha))
}

/// Residual-energy scaled probability for one node.
///
/// Normal nodes scale the weighted probability by `Ei(r) / Ei(t)`; advanced
/// nodes keep their weighted probability regardless of residual energy.
pub fn emeedp_probability(e: &ElectionParams, h: Heterogeneity, node: &Node) -> f64 {
    match node.kind {
        NodeKind::Normal => {
            e.p_opt * node.residual_energy / (h.energy_factor() * node.initial_energy)
        }
        NodeKind::Advanced => e.p_opt * (1.0 + h.alpha) / h.energy_factor(),
    }
}

/// Optimal cluster count transcribed as `M / d_toBS²`.
///
/// The printed formula is dimensionally inconsistent (it gives ≈ 0.068 for a
/// 100 m field); kept for reference only. The engines take `p_opt` from config.
pub fn k_opt_literal(side_m: f64, d_to_bs: f64) -> f64 {
    side_m / (d_to_bs * d_to_bs)
}

/// [`k_opt_literal`] with `d_toBS` taken from [`avg_distance_to_bs`].
pub fn k_opt_literal_for(region: &RegionConfig) -> f64 {
    k_opt_literal(region.side_m, avg_distance_to_bs(region))
}

pub fn p_opt_from_k(k_opt: f64, n: usize) -> f64 {
    k_opt / n as f64
}

/// Draws one uniform number per alive node in ascending id order; node `i`
/// becomes a candidate iff it is in G and its draw falls below `thresholds[i]`.
///
/// A draw is consumed for every alive node, in G or not, so the stream
/// position after election depends only on the alive set.
pub fn elect<R: Rng + ?Sized>(nodes: &[Node], thresholds: &[f64], rng: &mut R) -> Vec<NodeId> {
    debug_assert_eq!(nodes.len(), thresholds.len());
    let mut candidates = Vec::new();
    for (node, &t) in nodes.iter().zip(thresholds) {
        if !node.alive {
            continue;
        }
        let draw: f64 = rng.random();
        if node.in_g_set && draw < t {
            candidates.push(node.id);
        }
    }
    candidates
}

/// Greedy non-overlap filter: candidates are scanned by descending residual
/// energy (ties by ascending id) and kept iff they are at least
/// `cluster_radius` from every head already kept. Output is sorted by id.
pub fn suppress_overlaps(candidates: &[NodeId], nodes: &[Node], cluster_radius: f64) -> Vec<NodeId> {
    let mut order = candidates.to_vec();
    order.sort_by(|&a, &b| {
        nodes[b]
            .residual_energy
            .total_cmp(&nodes[a].residual_energy)
            .then(a.cmp(&b))
    });

    let mut confirmed: Vec<NodeId> = Vec::with_capacity(order.len());
    for id in order {
        let pos = nodes[id].position;
        if confirmed
            .iter()
            .all(|&c| distance(nodes[c].position, pos) >= cluster_radius)
        {
            confirmed.push(id);
        }
    }
    confirmed.sort_unstable();
    confirmed
}

/// Per-class G-set bookkeeping. Every node of a class re-enters G at the
/// start of each epoch of that class; a node leaves G when confirmed as CH.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochTracker {
    pub normal_epoch: Option<u32>,
    pub advanced_epoch: Option<u32>,
}

impl EpochTracker {
    pub fn new(p_normal: f64, p_advanced: f64) -> Self {
        Self {
            normal_epoch: epoch_length(p_normal),
            advanced_epoch: epoch_length(p_advanced),
        }
    }

    pub fn epoch_for(&self, kind: NodeKind) -> Option<u32> {
        match kind {
            NodeKind::Normal => self.normal_epoch,
            NodeKind::Advanced => self.advanced_epoch,
        }
    }

    /// Restores G membership for every class whose epoch starts at `round`.
    pub fn begin_round(&self, nodes: &mut [Node], round: u32) {
        for node in nodes.iter_mut().filter(|n| n.alive) {
            if let Some(epoch) = self.epoch_for(node.kind) {
                if round.is_multiple_of(epoch) {
                    node.in_g_set = true;
                }
            }
        }
    }

    pub fn mark_elected(&self, nodes: &mut [Node], heads: &[NodeId]) {
        for &id in heads {
            nodes[id].in_g_set = false;
        }
    }
}
