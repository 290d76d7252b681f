use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::engine::{Protocol, Simulation};
use crate::error::ExperimentError;
use crate::metrics::{export_csv, summarize, RoundRecord, SummaryStats};

use super::config::ExperimentConfig;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const SUMMARY_HEADER: &str = "protocol,seed,fnd,hnd,lnd,total_packets,rounds_simulated";

pub fn run_file_name(protocol: Protocol, seed: u64) -> String {
    format!("{}_seed{}.csv", protocol.tag(), seed)
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub protocol: Protocol,
    pub seed: u64,
    pub n_nodes: usize,
    pub records: Vec<RoundRecord>,
    pub summary: SummaryStats,
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    /// Protocol-major, in config order.
    pub runs: Vec<RunResult>,
    pub files: Vec<PathBuf>,
}

impl BatchResult {
    pub fn runs_for(&self, protocol: Protocol) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter(move |r| r.protocol == protocol)
    }
}

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| "NA".to_string(), |r| r.to_string())
}

pub fn summary_csv(runs: &[RunResult]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "{SUMMARY_HEADER}").unwrap();
    for r in runs {
        let s = &r.summary;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.protocol,
            r.seed,
            opt(s.first_node_death_round),
            opt(s.half_node_death_round),
            opt(s.last_node_death_round),
            s.total_packets,
            s.rounds_simulated
        )
        .unwrap();
    }
    out
}

/// Runs every (protocol, seed) pair in memory without touching disk.
pub fn simulate_batch(config: &ExperimentConfig) -> Result<Vec<RunResult>, ExperimentError> {
    config.validate()?;
    let sim = config.sim_config();
    let jobs: Vec<(Protocol, u64)> = config
        .protocols
        .iter()
        .flat_map(|&p| config.seeds.iter().map(move |&s| (p, s)))
        .collect();

    jobs.par_iter()
        .map(|&(protocol, seed)| {
            let (network, records) = Simulation::new(&sim, protocol, seed)?.run_records(config.max_rounds)?;
            let n_nodes = network.nodes.len();
            let summary = summarize(n_nodes, &records).expect("max_rounds >= 1 and a live network yield a round");
            Ok(RunResult {
                protocol,
                seed,
                n_nodes,
                records,
                summary,
            })
        })
        .collect()
}

struct Staged {
    written: Vec<PathBuf>,
}

impl Staged {
    fn write(&mut self, path: PathBuf, bytes: &[u8]) -> Result<(), ExperimentError> {
        fs::write(&path, bytes).map_err(|e| ExperimentError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn rollback(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Runs the batch and writes one round CSV per run, `summary.csv` and
/// `manifest.toml` (the resolved config) into `config.output_dir`.
/// Files written before a failure are removed.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchResult, ExperimentError> {
    let runs = simulate_batch(config)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;

    let mut staged = Staged { written: Vec::new() };
    match write_outputs(&mut staged, dir, config, &runs) {
        Ok(()) => Ok(BatchResult {
            runs,
            files: staged.written,
        }),
        Err(e) => {
            staged.rollback();
            Err(e)
        }
    }
}

fn write_outputs(
    staged: &mut Staged,
    dir: &Path,
    config: &ExperimentConfig,
    runs: &[RunResult],
) -> Result<(), ExperimentError> {
    for r in runs {
        staged.write(dir.join(run_file_name(r.protocol, r.seed)), &export_csv(&r.records))?;
    }
    staged.write(dir.join(SUMMARY_FILE), &summary_csv(runs))?;
    staged.write(dir.join(MANIFEST_FILE), config.to_toml_string().as_bytes())?;
    Ok(())
}
