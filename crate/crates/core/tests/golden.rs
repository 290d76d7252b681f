//! Round CSV regression check against a checked-in file. Set
//! `WSNSIM_BLESS=1` to regenerate after an intentional behaviour change.

use std::path::PathBuf;

use wsnsim_core::metrics::export_csv;
use wsnsim_core::{run_simulation, PopulationConfig, Protocol, SimConfig};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(protocol: Protocol) {
    let config = SimConfig {
        population: PopulationConfig {
            n: 20,
            e0: 0.02,
            ..PopulationConfig::default()
        },
        ..SimConfig::default()
    };
    let history = run_simulation(&config, protocol, 7, 400).unwrap();
    let csv = export_csv(&history.records);
    let path = golden(&format!("{}_n20_seed7.csv", protocol.tag()));
    if std::env::var_os("WSNSIM_BLESS").is_some() {
        std::fs::write(&path, &csv).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(csv == expected, "{} differs from the current output", path.display());
}

#[test]
fn emeedp_matches_golden() {
    check(Protocol::Emeedp);
}

#[test]
fn leach_matches_golden() {
    check(Protocol::Leach);
}

#[test]
fn sep_matches_golden() {
    check(Protocol::Sep);
}
