//! Shared fixtures for the benchmarks.

use wsnsim_core::SimConfig;

/// Default 100-node field used by every simulation benchmark.
pub fn default_config() -> SimConfig {
    SimConfig::default()
}

pub const ROUNDS: u32 = 5000;
