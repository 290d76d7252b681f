use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wsnsim_core::experiment::{self, ExperimentConfig};
use wsnsim_core::Protocol;

/// Clustering protocol simulator for heterogeneous wireless sensor networks.
#[derive(Debug, Parser)]
#[command(name = "wsnsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every protocol against every seed and write CSVs, a summary and charts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Re-render the SVG charts of a finished batch.
    Plot { output_dir: PathBuf },
    /// Parse and validate a config, then print the resolved settings.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Replace the configured seeds (repeatable).
    #[arg(long = "seed", value_name = "SEED")]
    seeds: Vec<u64>,
    /// Replace the configured protocols (repeatable): emeedp, leach or sep.
    #[arg(long = "protocol", value_name = "NAME")]
    protocols: Vec<Protocol>,
    /// Replace max_rounds.
    #[arg(long, value_name = "N")]
    rounds: Option<u32>,
    /// Replace output_dir.
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,
}

impl Overrides {
    fn apply(self, config: &mut ExperimentConfig) {
        if !self.seeds.is_empty() {
            config.seeds = self.seeds;
        }
        if !self.protocols.is_empty() {
            config.protocols = self.protocols;
        }
        if let Some(r) = self.rounds {
            config.max_rounds = r;
        }
        if let Some(dir) = self.output {
            config.output_dir = dir;
        }
    }
}

fn resolve(path: &PathBuf, overrides: Overrides) -> Result<ExperimentConfig> {
    let mut config = experiment::load_config(path).with_context(|| format!("loading {}", path.display()))?;
    overrides.apply(&mut config);
    config.validate().context("invalid override")?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, overrides } => {
            let config = resolve(&config, overrides)?;
            let batch = experiment::run_batch(&config)?;
            let charts = experiment::plot_dir(&config.output_dir)?;
            for r in &batch.runs {
                let s = &r.summary;
                let show = |v: Option<u32>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
                println!(
                    "{:<7} seed {:<6} FND {:>6}  HND {:>6}  LND {:>6}  packets {}",
                    r.protocol,
                    r.seed,
                    show(s.first_node_death_round),
                    show(s.half_node_death_round),
                    show(s.last_node_death_round),
                    s.total_packets
                );
            }
            println!(
                "wrote {} files to {}",
                batch.files.len() + charts.len(),
                config.output_dir.display()
            );
        }
        Command::Plot { output_dir } => {
            for path in experiment::plot_dir(&output_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Validate { config, overrides } => {
            let config = resolve(&config, overrides)?;
            print!("{}", config.to_toml_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
