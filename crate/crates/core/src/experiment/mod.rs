//! Batch experiments: config files, seed x protocol runs, result files and charts.

pub mod batch;
pub mod config;
pub mod plot;

pub use batch::{run_batch, run_file_name, simulate_batch, summary_csv, BatchResult, RunResult, MANIFEST_FILE, SUMMARY_FILE};
pub use config::{load_config, ExperimentConfig};
pub use plot::{load_results, plot_dir, render_plots, ALIVE_SVG, PACKETS_SVG, RESIDUAL_SVG};
