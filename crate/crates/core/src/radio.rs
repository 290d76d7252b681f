//! First-order radio model and the closed-form per-round energy budgets.
//!
//! [`tx_energy`] / [`rx_energy`] / [`aggregation_energy`] are what the
//! simulation engines charge. The `*_round_energy` functions are the
//! analytical budgets for a network of `n` nodes in `k` clusters; they keep
//! the free-space coefficient on every hop, including the CH uplink, and
//! are used for validation rather than simulation.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier, J/bit/m².
    pub eps_fs: f64,
    /// Multipath amplifier, J/bit/m⁴.
    pub eps_mp: f64,
    /// Data aggregation, J/bit/message.
    pub e_da: f64,
    /// Free-space / multipath crossover distance, m.
    pub d0: f64,
    /// Message length, bits.
    pub msg_bits: u32,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            eps_fs: 10e-12,
            eps_mp: 0.0013e-12,
            e_da: 5e-9,
            d0: 70.0,
            msg_bits: 4000,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            ("radio.e_elec", self.e_elec),
            ("radio.eps_fs", self.eps_fs),
            ("radio.eps_mp", self.eps_mp),
            ("radio.e_da", self.e_da),
            ("radio.d0", self.d0),
            ("radio.msg_bits", f64::from(self.msg_bits)),
        ];
        for (key, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::invalid(key, "must be > 0"));
            }
        }
        Ok(())
    }

    /// Crossover distance at which both amplifier models cost the same,
    /// `sqrt(eps_fs / eps_mp)`. Not used by the engines, which take `d0`
    /// as configured.
    pub fn derived_d0(&self) -> f64 {
        (self.eps_fs / self.eps_mp).sqrt()
    }

    fn bits(&self) -> f64 {
        f64::from(self.msg_bits)
    }
}

/// Energy to transmit `bits` over `d` meters. Free-space (d²) below `d0`,
/// multipath (d⁴) at or beyond it.
pub fn tx_energy(p: &RadioParams, bits: u32, d: f64) -> f64 {
    let bits = f64::from(bits);
    if d < p.d0 {
        bits * p.e_elec + bits * p.eps_fs * d * d
    } else {
        bits * p.e_elec + bits * p.eps_mp * d.powi(4)
    }
}

pub fn rx_energy(p: &RadioParams, bits: u32) -> f64 {
    f64::from(bits) * p.e_elec
}

/// Cost of fusing `messages` L-bit messages at a cluster head.
pub fn aggregation_energy(p: &RadioParams, messages: usize) -> f64 {
    messages as f64 * p.bits() * p.e_da
}

/// Analytical CH energy per round for `n` nodes in `k` clusters.
pub fn ch_round_energy(p: &RadioParams, n: usize, k: usize, d_to_bs: f64) -> f64 {
    debug_assert!(k >= 1 && n >= k);
    let l = p.bits();
    let per_cluster = n as f64 / k as f64;
    (per_cluster - 1.0) * l * p.e_elec
        + per_cluster * l * p.e_da
        + l * p.e_elec
        + l * p.eps_fs * d_to_bs * d_to_bs
}

/// Analytical energy of one cluster member per round.
pub fn non_ch_round_energy(p: &RadioParams, d_to_ch: f64) -> f64 {
    p.bits() * (p.e_elec + p.eps_fs * d_to_ch * d_to_ch)
}

/// Analytical energy of one cluster per round.
pub fn cluster_round_energy(
    p: &RadioParams,
    n: usize,
    k: usize,
    d_to_bs: f64,
    d_to_ch: f64,
) -> f64 {
    debug_assert!(k >= 1);
    ch_round_energy(p, n, k, d_to_bs) + (n as f64 / k as f64) * non_ch_round_energy(p, d_to_ch)
}

/// Analytical energy of the whole network per round.
pub fn network_round_energy(
    p: &RadioParams,
    n: usize,
    k: usize,
    d_to_bs: f64,
    d_to_ch: f64,
) -> f64 {
    debug_assert!(k >= 1);
    let (n, k) = (n as f64, k as f64);
    p.bits()
        * (2.0 * n * p.e_elec
            + n * p.e_da
            + k * p.eps_fs * d_to_bs * d_to_bs
            + n * p.eps_fs * d_to_ch * d_to_ch)
}
