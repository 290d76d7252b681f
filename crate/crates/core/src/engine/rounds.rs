use std::collections::BTreeMap;

use crate::election::{
    elect, emeedp_probability, emeedp_threshold, leach_threshold, suppress_overlaps, weighted_probabilities,
    EpochTracker,
};
use crate::error::SimError;
use crate::model::{distance, Node, NodeId, NodeKind, Point};
use crate::radio::{aggregation_energy, rx_energy, tx_energy, RadioParams};
use crate::rng::SimRng;

use super::{ClusterAssignment, RelayDecision, RoundOutcome, SimState};

/// Rounds a node idles after finding the nearest cluster head costlier than the BS.
pub const SLEEP_ROUNDS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinDecision {
    Joined(NodeId),
    Sleep,
    Direct,
}

/// Nearest head to `from`; equidistant heads resolve to the lowest id.
fn nearest_head(from: Point, heads: &[NodeId], nodes: &[Node]) -> Option<(NodeId, f64)> {
    let mut best: Option<(NodeId, f64)> = None;
    for &h in heads {
        let d = distance(from, nodes[h].position);
        match best {
            Some((bid, bd)) if d > bd || (d == bd && h > bid) => {}
            _ => best = Some((h, d)),
        }
    }
    best
}

/// Compares the cost of reaching the nearest head (E1) against transmitting
/// straight to the BS (E2). Joins when `E1 <= E2`, otherwise defers to sleep.
/// With no head at all the node transmits direct.
pub fn join_or_defer(node: &Node, heads: &[NodeId], nodes: &[Node], bs: Point, radio: &RadioParams) -> JoinDecision {
    let Some((ch, d2)) = nearest_head(node.position, heads, nodes) else {
        return JoinDecision::Direct;
    };
    let d3 = distance(node.position, bs);
    let e1 = tx_energy(radio, radio.msg_bits, d2);
    let e2 = tx_energy(radio, radio.msg_bits, d3);
    if e1 <= e2 {
        JoinDecision::Joined(ch)
    } else {
        JoinDecision::Sleep
    }
}

/// Picks an advanced node to forward a normal head's aggregate to the BS.
///
/// Eligible relays are alive, advanced, not heads this round, closer to the
/// head than the BS is, and cheaper for the head to reach than the BS. Among
/// those the one minimizing `d(CH,AN)² + d(AN,BS)²` wins (lowest id on ties),
/// which favours nodes near the midpoint of the CH–BS segment.
pub fn select_relay<'a>(
    ch: &Node,
    candidates: impl IntoIterator<Item = &'a Node>,
    heads: &[NodeId],
    bs: Point,
    radio: &RadioParams,
) -> RelayDecision {
    let d_ch_bs = distance(ch.position, bs);
    let direct_cost = tx_energy(radio, radio.msg_bits, d_ch_bs);

    let mut best: Option<(f64, &Node, f64, f64)> = None;
    for an in candidates {
        if !an.alive || an.kind != NodeKind::Advanced || an.id == ch.id || heads.binary_search(&an.id).is_ok() {
            continue;
        }
        let d_ch_an = distance(ch.position, an.position);
        if d_ch_an >= d_ch_bs || tx_energy(radio, radio.msg_bits, d_ch_an) >= direct_cost {
            continue;
        }
        let d_an_bs = distance(an.position, bs);
        let score = d_ch_an * d_ch_an + d_an_bs * d_an_bs;
        match best {
            Some((s, b, _, _)) if score > s || (score == s && an.id > b.id) => {}
            _ => best = Some((score, an, d_ch_an, d_an_bs)),
        }
    }

    match best {
        Some((_, an, d_ch_an, d_an_bs)) => RelayDecision {
            ch_id: ch.id,
            relay_id: Some(an.id),
            d_ch_an: Some(d_ch_an),
            d_an_bs: Some(d_an_bs),
            d_ch_bs,
        },
        None => RelayDecision {
            ch_id: ch.id,
            relay_id: None,
            d_ch_an: None,
            d_an_bs: None,
            d_ch_bs,
        },
    }
}

/// Per-round energy ledger. Deductions are floored at the node's residual.
struct Ledger {
    spent: Vec<f64>,
    deduct: bool,
}

impl Ledger {
    fn new(n: usize, deduct: bool) -> Self {
        Self {
            spent: vec![0.0; n],
            deduct,
        }
    }

    fn charge(&mut self, nodes: &mut [Node], id: NodeId, amount: f64) {
        if !self.deduct {
            return;
        }
        let node = &mut nodes[id];
        let actual = amount.min(node.residual_energy);
        node.residual_energy -= actual;
        self.spent[id] += actual;
    }
}

fn ensure_alive(state: &SimState, round: u32) -> Result<(), SimError> {
    if state.nodes.iter().any(|n| n.alive) {
        Ok(())
    } else {
        Err(SimError::Complete { round })
    }
}

/// Turns candidates into heads: drops them from G, wakes sleepers, resets the
/// per-node CH bookkeeping.
fn install_heads(state: &mut SimState, tracker: &EpochTracker, heads: &[NodeId]) {
    tracker.mark_elected(&mut state.nodes, heads);
    for &h in heads {
        let n = &mut state.nodes[h];
        n.sleep_rounds_remaining = 0;
        n.uncovered_rounds = 0;
    }
}

fn age_ch_counters(nodes: &mut [Node], heads: &[NodeId]) {
    for n in nodes.iter_mut().filter(|n| n.alive) {
        n.rounds_since_ch = n.rounds_since_ch.map(|r| r.saturating_add(1));
    }
    for &h in heads {
        nodes[h].rounds_since_ch = Some(0);
    }
}

fn empty_assignment(heads: Vec<NodeId>) -> ClusterAssignment {
    let members = heads.iter().map(|&h| (h, Vec::new())).collect::<BTreeMap<_, _>>();
    ClusterAssignment {
        cluster_heads: heads,
        members,
        direct_transmitters: Vec::new(),
        sleepers: Vec::new(),
    }
}

/// Charges the data-gathering phase, applies deaths and counts packets that
/// reach the BS. Members → heads, head aggregation, head uplinks (direct or
/// via relay), then direct transmitters.
fn gather(state: &mut SimState, round: u32, assignment: ClusterAssignment, relays: Vec<RelayDecision>) -> RoundOutcome {
    let radio = state.radio;
    let bits = radio.msg_bits;
    let bs = state.region.bs_position;
    let mut ledger = Ledger::new(state.nodes.len(), state.deduct_energy);

    for (&ch, members) in &assignment.members {
        let ch_pos = state.nodes[ch].position;
        for &m in members {
            let d = distance(state.nodes[m].position, ch_pos);
            ledger.charge(&mut state.nodes, m, tx_energy(&radio, bits, d));
        }
        let cost = members.len() as f64 * rx_energy(&radio, bits) + aggregation_energy(&radio, members.len() + 1);
        ledger.charge(&mut state.nodes, ch, cost);
    }

    for &ch in &assignment.cluster_heads {
        match relays.iter().find(|r| r.ch_id == ch).and_then(|r| r.relay_id.map(|a| (a, r))) {
            Some((an, r)) => {
                let d_ch_an = r.d_ch_an.expect("relay distance set with relay id");
                let d_an_bs = r.d_an_bs.expect("relay distance set with relay id");
                ledger.charge(&mut state.nodes, ch, tx_energy(&radio, bits, d_ch_an));
                ledger.charge(&mut state.nodes, an, rx_energy(&radio, bits) + tx_energy(&radio, bits, d_an_bs));
            }
            None => {
                let d = distance(state.nodes[ch].position, bs);
                ledger.charge(&mut state.nodes, ch, tx_energy(&radio, bits, d));
            }
        }
    }

    for &id in &assignment.direct_transmitters {
        let d = distance(state.nodes[id].position, bs);
        ledger.charge(&mut state.nodes, id, tx_energy(&radio, bits, d));
    }

    let mut deaths = Vec::new();
    for n in state.nodes.iter_mut().filter(|n| n.alive) {
        if n.residual_energy <= 0.0 {
            n.residual_energy = 0.0;
            n.alive = false;
            n.sleep_rounds_remaining = 0;
            deaths.push(n.id);
        }
    }

    let packets = assignment.cluster_heads.len() + assignment.direct_transmitters.len();
    RoundOutcome {
        round,
        assignment,
        relays,
        energy_spent: ledger.spent,
        packets_delivered_to_bs: packets,
        deaths,
    }
}

/// Shared body of the two baselines: rotating-threshold election with the
/// given per-class probabilities, nearest-head joining, direct uplinks.
fn run_round_baseline(
    state: &mut SimState,
    round: u32,
    rng: &mut SimRng,
    p_normal: f64,
    p_advanced: f64,
) -> Result<RoundOutcome, SimError> {
    ensure_alive(state, round)?;
    let tracker = EpochTracker::new(p_normal, p_advanced);
    tracker.begin_round(&mut state.nodes, round);

    let thresholds: Vec<f64> = state
        .nodes
        .iter()
        .map(|n| {
            let p = match n.kind {
                NodeKind::Normal => p_normal,
                NodeKind::Advanced => p_advanced,
            };
            if n.alive { leach_threshold(p, round, n.in_g_set) } else { 0.0 }
        })
        .collect();
    let heads = elect(&state.nodes, &thresholds, rng);
    install_heads(state, &tracker, &heads);
    age_ch_counters(&mut state.nodes, &heads);

    let mut assignment = empty_assignment(heads.clone());
    for id in 0..state.nodes.len() {
        let node = &state.nodes[id];
        if !node.alive || assignment.is_head(id) {
            continue;
        }
        match nearest_head(node.position, &heads, &state.nodes) {
            Some((ch, _)) => {
                assignment.members.get_mut(&ch).expect("head has entry").push(id);
                state.nodes[id].uncovered_rounds = 0;
            }
            None => {
                assignment.direct_transmitters.push(id);
                state.nodes[id].uncovered_rounds = 0;
            }
        }
    }

    Ok(gather(state, round, assignment, Vec::new()))
}

/// LEACH round: uniform `p_opt` for every node.
pub fn run_round_leach(state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
    let p = state.election.p_opt;
    run_round_baseline(state, round, rng, p, p)
}

/// SEP round: weighted probabilities per node class.
pub fn run_round_sep(state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
    let (p_nrm, p_adv) = weighted_probabilities(&state.election, state.heterogeneity);
    run_round_baseline(state, round, rng, p_nrm, p_adv)
}

/// EMEEDP round.
///
/// 1. Residual-energy probabilities and thresholds, election, overlap
///    suppression. Elected sleepers wake.
/// 2. Every other alive node joins its nearest head when that is no costlier
///    than reaching the BS, otherwise sleeps. A sleeper wakes to join as soon
///    as such a head exists; after [`SLEEP_ROUNDS`] idle rounds it transmits
///    direct and starts over. Awake nodes with no head at all go direct.
/// 3. Normal heads look for an advanced relay; advanced heads uplink direct.
/// 4. Energy accounting, deaths and packet counting.
pub fn run_round_emeedp(state: &mut SimState, round: u32, rng: &mut SimRng) -> Result<RoundOutcome, SimError> {
    ensure_alive(state, round)?;
    let (p_nrm, p_adv) = weighted_probabilities(&state.election, state.heterogeneity);
    let tracker = EpochTracker::new(p_nrm, p_adv);
    tracker.begin_round(&mut state.nodes, round);

    let thresholds: Vec<f64> = state
        .nodes
        .iter()
        .map(|n| {
            if n.alive {
                let p_i = emeedp_probability(&state.election, state.heterogeneity, n);
                emeedp_threshold(p_i, round, n.in_g_set)
            } else {
                0.0
            }
        })
        .collect();
    let candidates = elect(&state.nodes, &thresholds, rng);
    let heads = suppress_overlaps(&candidates, &state.nodes, state.election.cluster_radius_m);
    install_heads(state, &tracker, &heads);
    age_ch_counters(&mut state.nodes, &heads);

    let bs = state.region.bs_position;
    let mut assignment = empty_assignment(heads.clone());
    for id in 0..state.nodes.len() {
        if !state.nodes[id].alive || assignment.is_head(id) {
            continue;
        }
        let decision = join_or_defer(&state.nodes[id], &heads, &state.nodes, bs, &state.radio);
        let node = &mut state.nodes[id];
        match (node.is_asleep(), decision) {
            (_, JoinDecision::Joined(ch)) => {
                assignment.members.get_mut(&ch).expect("head has entry").push(id);
                node.sleep_rounds_remaining = 0;
                node.uncovered_rounds = 0;
            }
            (true, _) => {
                node.sleep_rounds_remaining -= 1;
                if node.sleep_rounds_remaining == 0 {
                    assignment.direct_transmitters.push(id);
                    node.uncovered_rounds = 0;
                } else {
                    assignment.sleepers.push(id);
                    node.uncovered_rounds += 1;
                }
            }
            (false, JoinDecision::Sleep) => {
                node.sleep_rounds_remaining = SLEEP_ROUNDS;
                node.uncovered_rounds += 1;
                assignment.sleepers.push(id);
            }
            (false, JoinDecision::Direct) => {
                assignment.direct_transmitters.push(id);
                node.uncovered_rounds = 0;
            }
        }
    }

    let relays: Vec<RelayDecision> = heads
        .iter()
        .filter(|&&h| state.nodes[h].kind == NodeKind::Normal)
        .map(|&h| {
            // Sleeping nodes stay idle, so they cannot forward.
            let pool = state
                .nodes
                .iter()
                .filter(|n| n.is_advanced() && assignment.sleepers.binary_search(&n.id).is_err());
            select_relay(&state.nodes[h], pool, &heads, bs, &state.radio)
        })
        .collect();

    Ok(gather(state, round, assignment, relays))
}
