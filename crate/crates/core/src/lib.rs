//! Simulation of energy-aware clustering protocols for heterogeneous
//! wireless sensor networks.
//!
//! The crate models a square field of battery-powered nodes reporting to a
//! single base station, and runs three clustering protocols over it:
//! EMEEDP (residual-energy weighted election with overlap suppression,
//! sleep scheduling and relaying through advanced nodes), LEACH and SEP.

pub mod election;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod radio;
pub mod rng;

pub use engine::{
    run_simulation, ClusterAssignment, ClusteringProtocol, Protocol, RoundOutcome, RunHistory, SimConfig, SimState,
    Simulation,
};
pub use error::{ConfigError, ExperimentError, MetricsError, SimError};
pub use experiment::{load_config, run_batch, ExperimentConfig};
pub use metrics::{summarize, RoundRecord, SummaryStats};
pub use model::{deploy, Network, Node, NodeId, NodeKind, Point, PopulationConfig, RegionConfig};
pub use radio::RadioParams;
