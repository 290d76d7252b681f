use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::election::ElectionParams;
use crate::engine::{Protocol, SimConfig};
use crate::error::ConfigError;
use crate::model::{PopulationConfig, RegionConfig};
use crate::radio::RadioParams;

/// A batch of runs: every protocol against every seed.
///
/// Stored as TOML. Every key is optional; omitted keys take the defaults
/// below (100 nodes on a 100 m field, BS at the centre, the standard radio
/// constants, `p_opt = 0.1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocols: Vec<Protocol>,
    pub seeds: Vec<u64>,
    pub max_rounds: u32,
    pub output_dir: PathBuf,
    pub region: RegionConfig,
    pub population: PopulationConfig,
    pub radio: RadioParams,
    pub election: ElectionParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            protocols: Protocol::ALL.to_vec(),
            seeds: vec![1],
            max_rounds: 5000,
            output_dir: PathBuf::from("results"),
            region: RegionConfig::default(),
            population: PopulationConfig::default(),
            radio: RadioParams::default(),
            election: ElectionParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            region: self.region,
            population: self.population,
            radio: self.radio,
            election: self.election,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.protocols.is_empty() {
            return Err(ConfigError::invalid("protocols", "at least one protocol is required"));
        }
        if self.protocols.iter().collect::<BTreeSet<_>>().len() != self.protocols.len() {
            return Err(ConfigError::invalid("protocols", "duplicate protocol"));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::invalid("seeds", "at least one seed is required"));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(ConfigError::invalid("seeds", "duplicate seed"));
        }
        if self.max_rounds < 1 {
            return Err(ConfigError::invalid("max_rounds", "must be >= 1"));
        }
        self.sim_config().validate()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = ExperimentConfig::from_toml_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;

    fn load_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, text).unwrap();
        load_config(&path)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = load_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.region.bs_position, Point::new(50.0, 50.0));
        assert_eq!(c.population.e0, 0.5);
        assert_eq!(c.election.p_opt, 0.1);
        assert_eq!(c.radio.d0, 70.0);
        assert_eq!(c.radio.msg_bits, 4000);
        assert_eq!(c.population.n, 100);
        assert_eq!(c.region.side_m, 100.0);
    }

    #[test]
    fn negative_e0_names_key() {
        let err = load_str("[population]\ne0 = -1.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { .. }));
        assert!(err.to_string().contains("e0"), "{err}");
    }

    #[test]
    fn malformed_file_is_a_parse_error() {
        let err = load_str("[population\nn = 3").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        let err = load_str("[population]\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = load_str("protocols = [\"pegasis\"]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
    }

    #[test]
    fn batch_level_validation() {
        assert!(load_str("protocols = []\n").unwrap_err().to_string().contains("protocols"));
        assert!(load_str("seeds = []\n").unwrap_err().to_string().contains("seeds"));
        assert!(load_str("max_rounds = 0\n").unwrap_err().to_string().contains("max_rounds"));
        assert!(load_str("protocols = [\"sep\", \"sep\"]\n").is_err());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = load_str("seeds = [3, 4]\n[population]\nm_fraction = 0.2\nalpha = 3.0\n").unwrap();
        assert_eq!(c.seeds, vec![3, 4]);
        assert_eq!(c.population.m_fraction, 0.2);
        assert_eq!(c.population.alpha, 3.0);
        assert_eq!(c.population.n, 100);
    }

    #[test]
    fn manifest_round_trip() {
        let mut c = ExperimentConfig::default();
        c.population.m_fraction = 0.1;
        c.population.alpha = 1.0;
        c.seeds = vec![1, 2, 3];
        c.protocols = vec![Protocol::Leach, Protocol::Emeedp];
        let text = c.to_toml_string();
        assert!(text.contains("m_fraction = 0.1"));
        assert!(text.contains("alpha = 1.0"));
        assert_eq!(load_str(&text).unwrap(), c);
    }
}
