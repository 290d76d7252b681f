//! Checks a full run history against the structural invariants every engine
//! must uphold. Used by the acceptance suite and property tests.

use std::collections::BTreeSet;

use crate::model::{distance, Network, NodeKind};
use crate::radio::{tx_energy, RadioParams};

use super::{RoundOutcome, RunHistory};

/// Relative tolerance for the per-round energy balance.
pub const CONSERVATION_RTOL: f64 = 1e-9;
const REPLAY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub round: u32,
    pub what: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "round {}: {}", self.round, self.what)
    }
}

fn fail(round: u32, what: impl Into<String>) -> Result<(), Violation> {
    Err(Violation {
        round,
        what: what.into(),
    })
}

/// Replays `outcomes` against the deployed `network` and verifies:
///
/// - each round's alive set is partitioned into heads, members, direct
///   transmitters and sleepers;
/// - only alive nodes die, and once dead a node never reappears;
/// - no node spends more than it had, residuals stay non-negative, and
///   sleepers spend nothing;
/// - every relay is alive, advanced, not a head, not asleep, closer to its
///   head than the BS is, and cheaper for the head to reach than the BS;
/// - each node's replayed residual (initial minus spends) stays non-negative
///   and is zero when it dies.
pub fn check_history(network: &Network, radio: &RadioParams, outcomes: &[RoundOutcome]) -> Result<(), Violation> {
    let n = network.nodes.len();
    let bs = network.region.bs_position;
    let mut residual: Vec<f64> = network.nodes.iter().map(|n| n.initial_energy).collect();
    // Replayed residuals drift from the engine's by rounding only.
    let slack: Vec<f64> = network.nodes.iter().map(|n| n.initial_energy * REPLAY_RTOL).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();

    for out in outcomes {
        let r = out.round;
        let a = &out.assignment;

        let mut seen = BTreeSet::new();
        let all = a
            .cluster_heads
            .iter()
            .chain(a.members.values().flatten())
            .chain(&a.direct_transmitters)
            .chain(&a.sleepers);
        for &id in all {
            if !seen.insert(id) {
                return fail(r, format!("node {id} holds more than one role"));
            }
        }
        if seen != alive {
            return fail(r, "roles do not cover exactly the alive nodes");
        }
        if a.members.keys().copied().collect::<Vec<_>>() != a.cluster_heads {
            return fail(r, "member lists do not match the head set");
        }

        if out.energy_spent.len() != n {
            return fail(r, "energy vector has wrong length");
        }
        for (id, &spent) in out.energy_spent.iter().enumerate() {
            if spent < 0.0 || spent > residual[id] + slack[id] {
                return fail(r, format!("node {id} spent {spent} with {} left", residual[id]));
            }
        }
        for &s in &a.sleepers {
            if out.energy_spent[s] != 0.0 {
                return fail(r, format!("sleeper {s} spent energy"));
            }
        }

        for rel in &out.relays {
            let ch = &network.nodes[rel.ch_id];
            if ch.kind != NodeKind::Normal || !a.is_head(rel.ch_id) {
                return fail(r, format!("relay decision for non-normal or non-head {}", rel.ch_id));
            }
            let Some(an_id) = rel.relay_id else { continue };
            let an = &network.nodes[an_id];
            let d_ch_an = distance(ch.position, an.position);
            let d_ch_bs = distance(ch.position, bs);
            let ok = alive.contains(&an_id)
                && an.kind == NodeKind::Advanced
                && !a.is_head(an_id)
                && !a.sleepers.contains(&an_id)
                && d_ch_an < d_ch_bs
                && tx_energy(radio, radio.msg_bits, d_ch_an) < tx_energy(radio, radio.msg_bits, d_ch_bs);
            if !ok {
                return fail(r, format!("relay {an_id} for head {} is not eligible", rel.ch_id));
            }
        }

        let expected_packets = a.cluster_heads.len() + a.direct_transmitters.len();
        if out.packets_delivered_to_bs != expected_packets {
            return fail(r, "packet count does not match heads + direct transmitters");
        }

        for (id, &spent) in out.energy_spent.iter().enumerate() {
            residual[id] -= spent;
        }
        for &d in &out.deaths {
            if !alive.remove(&d) {
                return fail(r, format!("node {d} died twice or was never alive"));
            }
            if residual[d] > slack[d] {
                return fail(r, format!("node {d} died with {} J left", residual[d]));
            }
        }
        if residual.iter().zip(&slack).any(|(&e, &tol)| e < -tol) {
            return fail(r, "negative residual energy");
        }
    }
    Ok(())
}

/// Energy balance of a run: after every round, the cumulative spend plus the
/// engine's reported residual total equals the deployed initial energy, and
/// the per-round drop in residual equals that round's spend.
pub fn check_conservation(history: &RunHistory, rtol: f64) -> Result<(), Violation> {
    let total = history.network.total_initial_energy();
    let mut cumulative = 0.0;
    let mut prev_residual = total;
    for (out, rec) in history.outcomes.iter().zip(&history.records) {
        let spent = out.total_spent();
        cumulative += spent;
        let balance = cumulative + rec.total_residual_energy;
        if ((balance - total) / total).abs() > rtol {
            return fail(out.round, format!("energy balance {balance} != {total}"));
        }
        let drop = prev_residual - rec.total_residual_energy;
        if (drop - spent).abs() > rtol * total {
            return fail(out.round, format!("residual dropped {drop} but {spent} was spent"));
        }
        prev_residual = rec.total_residual_energy;
    }
    Ok(())
}

/// Structural checks, energy balance and monotone alive counts.
pub fn check_run(history: &RunHistory, radio: &RadioParams) -> Result<(), Violation> {
    check_history(&history.network, radio, &history.outcomes)?;
    check_conservation(history, CONSERVATION_RTOL)?;
    for w in history.records.windows(2) {
        if w[1].alive_total > w[0].alive_total {
            return fail(w[1].round, "alive count increased");
        }
    }
    Ok(())
}
