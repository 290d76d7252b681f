//! Per-round records, lifetime summaries and the round CSV format.

use std::io::{self, Write};

use serde::Deserialize;

use crate::engine::RoundOutcome;
use crate::error::MetricsError;
use crate::model::{Node, NodeKind};

pub const CSV_HEADER: &str =
    "round,alive_total,alive_normal,alive_advanced,ch_count,relayed_count,packets_to_bs,total_residual_energy,energy_spent";

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub alive_total: usize,
    pub alive_normal: usize,
    pub alive_advanced: usize,
    pub ch_count: usize,
    pub relayed_count: usize,
    pub packets_to_bs: usize,
    pub total_residual_energy: f64,
    pub energy_spent: f64,
}

/// Lifetime milestones. `None` means the milestone was not reached within
/// the simulated horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummaryStats {
    /// First round in which a node died (stability period).
    pub first_node_death_round: Option<u32>,
    /// First round with at most half the nodes alive.
    pub half_node_death_round: Option<u32>,
    /// First round with no node alive (network lifetime).
    pub last_node_death_round: Option<u32>,
    pub total_packets: u64,
    pub rounds_simulated: u32,
}

/// Projects an outcome and the post-round node states into a record.
pub fn record_round(outcome: &RoundOutcome, nodes: &[Node]) -> RoundRecord {
    let (mut normal, mut advanced) = (0, 0);
    for n in nodes.iter().filter(|n| n.alive) {
        match n.kind {
            NodeKind::Normal => normal += 1,
            NodeKind::Advanced => advanced += 1,
        }
    }
    RoundRecord {
        round: outcome.round,
        alive_total: normal + advanced,
        alive_normal: normal,
        alive_advanced: advanced,
        ch_count: outcome.assignment.cluster_heads.len(),
        relayed_count: outcome.relayed_count(),
        packets_to_bs: outcome.packets_delivered_to_bs,
        total_residual_energy: nodes.iter().map(|n| n.residual_energy).sum(),
        energy_spent: outcome.total_spent(),
    }
}

/// Scans a history of a network that started with `n_nodes` alive nodes.
pub fn summarize(n_nodes: usize, history: &[RoundRecord]) -> Result<SummaryStats, MetricsError> {
    if history.is_empty() {
        return Err(MetricsError::EmptyHistory);
    }
    let first_where = |pred: &dyn Fn(&RoundRecord) -> bool| history.iter().find(|r| pred(r)).map(|r| r.round);
    Ok(SummaryStats {
        first_node_death_round: first_where(&|r| r.alive_total < n_nodes),
        half_node_death_round: first_where(&|r| 2 * r.alive_total <= n_nodes),
        last_node_death_round: first_where(&|r| r.alive_total == 0),
        total_packets: history.iter().map(|r| r.packets_to_bs as u64).sum(),
        rounds_simulated: history.len() as u32,
    })
}

/// Formats `x` like C's `%.9g`: 9 significant digits, trailing zeros
/// dropped, exponent form outside `1e-5 <= |x| < 1e9`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(mut out: W, history: &[RoundRecord]) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in history {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.round,
            r.alive_total,
            r.alive_normal,
            r.alive_advanced,
            r.ch_count,
            r.relayed_count,
            r.packets_to_bs,
            format_sig9(r.total_residual_energy),
            format_sig9(r.energy_spent),
        )?;
    }
    Ok(())
}

pub fn export_csv(history: &[RoundRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, history).expect("writing to a Vec cannot fail");
    buf
}

/// Parses a round CSV produced by [`export_csv`].
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RoundRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
