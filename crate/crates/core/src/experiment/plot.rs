//! Self-contained SVG line charts of batch results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::Protocol;
use crate::error::ExperimentError;
use crate::metrics::{read_csv, RoundRecord};

use super::batch::{run_file_name, MANIFEST_FILE};
use super::config::{load_config, ExperimentConfig};

pub const ALIVE_SVG: &str = "alive_nodes.svg";
pub const RESIDUAL_SVG: &str = "residual_energy.svg";
pub const PACKETS_SVG: &str = "cumulative_packets.svg";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    /// `y` value per round, starting at round 0.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Rounds `span / target` up to 1, 2 or 5 times a power of ten.
fn nice_step(span: f64, target: usize) -> f64 {
    if span <= 0.0 {
        return 1.0;
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(max: f64, target: usize) -> (f64, Vec<f64>) {
    let step = nice_step(max, target);
    let top = (max / step).ceil().max(1.0) * step;
    let n = (top / step).round() as usize;
    (top, (0..=n).map(|i| i as f64 * step).collect())
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1.0 && v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl LineChart {
    pub fn render(&self) -> String {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let max_len = self.series.iter().map(|s| s.values.len()).max().unwrap_or(0);
        let x_max_data = max_len.saturating_sub(1).max(1) as f64;
        let y_max_data = self
            .series
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .fold(0.0f64, f64::max);
        let (x_top, x_ticks) = ticks(x_max_data, 8);
        let (y_top, y_ticks) = ticks(if y_max_data > 0.0 { y_max_data } else { 1.0 }, 6);
        let sx = |x: f64| MARGIN_LEFT + x / x_top * plot_w;
        let sy = |y: f64| MARGIN_TOP + plot_h - y / y_top * plot_h;

        let mut svg = String::new();
        writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        )
        .unwrap();

        svg.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
        for &t in &y_ticks {
            let y = sy(t);
            writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, MARGIN_LEFT, MARGIN_LEFT + plot_w).unwrap();
        }
        svg.push_str("</g>\n");

        svg.push_str("<g stroke=\"black\" stroke-width=\"1\">\n");
        writeln!(
            svg,
            r#"<line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}"/>"#,
            l = MARGIN_LEFT,
            r = MARGIN_LEFT + plot_w,
            b = MARGIN_TOP + plot_h
        )
        .unwrap();
        writeln!(
            svg,
            r#"<line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}"/>"#,
            l = MARGIN_LEFT,
            t = MARGIN_TOP,
            b = MARGIN_TOP + plot_h
        )
        .unwrap();
        svg.push_str("</g>\n");

        svg.push_str("<g text-anchor=\"middle\">\n");
        for &t in &x_ticks {
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, sx(t), MARGIN_TOP + plot_h + 18.0, tick_label(t)).unwrap();
        }
        svg.push_str("</g>\n<g text-anchor=\"end\">\n");
        for &t in &y_ticks {
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, MARGIN_LEFT - 6.0, sy(t) + 4.0, tick_label(t)).unwrap();
        }
        svg.push_str("</g>\n");

        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="16" y="{y:.2}" text-anchor="middle" transform="rotate(-90 16 {y:.2})">{}</text>"#,
            escape(&self.y_label),
            y = MARGIN_TOP + plot_h / 2.0
        )
        .unwrap();

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut points = String::new();
            for (x, &y) in s.values.iter().enumerate() {
                if !points.is_empty() {
                    points.push(' ');
                }
                write!(points, "{:.2},{:.2}", sx(x as f64), sy(y)).unwrap();
            }
            writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#
            )
            .unwrap();
        }

        svg.push_str("<g class=\"legend\">\n");
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let x = WIDTH - MARGIN_RIGHT + 16.0;
            let y = MARGIN_TOP + 10.0 + 20.0 * i as f64;
            writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/>"#,
                x + 22.0
            )
            .unwrap();
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 28.0, y + 4.0, escape(&s.name)).unwrap();
        }
        svg.push_str("</g>\n</svg>\n");
        svg
    }
}

/// Results of one protocol: `(seed, records)` per run.
pub type ProtocolRuns = (Protocol, Vec<(u64, Vec<RoundRecord>)>);

/// Reads the manifest and every round CSV it names from `dir`.
pub fn load_results(dir: &Path) -> Result<(ExperimentConfig, Vec<ProtocolRuns>), ExperimentError> {
    let config = load_config(dir.join(MANIFEST_FILE))?;
    let mut out = Vec::new();
    for &p in &config.protocols {
        let mut runs = Vec::new();
        for &seed in &config.seeds {
            let path = dir.join(run_file_name(p, seed));
            let file = fs::File::open(&path).map_err(|e| ExperimentError::io(&path, e))?;
            let records = read_csv(file).map_err(|e| ExperimentError::Results {
                path: path.clone(),
                message: e.to_string(),
            })?;
            runs.push((seed, records));
        }
        out.push((p, runs));
    }
    Ok((config, out))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-round median across runs of `metric`. Runs shorter than the longest
/// one are held at their final value.
pub fn median_series(runs: &[Vec<f64>]) -> Vec<f64> {
    let len = runs.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let mut col: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.get(i).or_else(|| r.last()).copied())
                .collect();
            median(&mut col)
        })
        .collect()
}

fn cumulative(values: impl Iterator<Item = f64>) -> Vec<f64> {
    values
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Builds the three comparison charts: alive nodes, total residual energy
/// and cumulative packets delivered, each as a seed-median per protocol.
pub fn build_charts(results: &[ProtocolRuns]) -> Result<Vec<(&'static str, LineChart)>, ExperimentError> {
    if results.is_empty() {
        return Err(ExperimentError::EmptyPlot("no protocols".into()));
    }
    for (p, runs) in results {
        if runs.is_empty() {
            return Err(ExperimentError::EmptyPlot(format!("{p} has no runs")));
        }
        if let Some((seed, _)) = runs.iter().find(|(_, r)| r.is_empty()) {
            return Err(ExperimentError::EmptyPlot(format!("{p} seed {seed} has an empty history")));
        }
    }

    let metric = |f: &dyn Fn(&[RoundRecord]) -> Vec<f64>| -> Vec<Series> {
        results
            .iter()
            .map(|(p, runs)| Series {
                name: p.tag().to_string(),
                values: median_series(&runs.iter().map(|(_, r)| f(r)).collect::<Vec<_>>()),
            })
            .collect()
    };

    let chart = |title: &str, y: &str, series| LineChart {
        title: title.into(),
        x_label: "round".into(),
        y_label: y.into(),
        series,
    };

    Ok(vec![
        (
            ALIVE_SVG,
            chart(
                "Alive nodes per round (seed median)",
                "alive nodes",
                metric(&|r| r.iter().map(|x| x.alive_total as f64).collect()),
            ),
        ),
        (
            RESIDUAL_SVG,
            chart(
                "Total residual energy (seed median)",
                "residual energy (J)",
                metric(&|r| r.iter().map(|x| x.total_residual_energy).collect()),
            ),
        ),
        (
            PACKETS_SVG,
            chart(
                "Cumulative packets to BS (seed median)",
                "packets",
                metric(&|r| cumulative(r.iter().map(|x| x.packets_to_bs as f64))),
            ),
        ),
    ])
}

/// Writes the three SVG charts into `dir`. Nothing is written if the
/// results are empty.
pub fn render_plots(results: &[ProtocolRuns], dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let charts = build_charts(results)?;
    let mut written = Vec::new();
    for (name, chart) in charts {
        let path = dir.join(name);
        fs::write(&path, chart.render()).map_err(|e| ExperimentError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Loads a finished batch from `dir` and renders its charts there.
pub fn plot_dir(dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let (_, results) = load_results(dir)?;
    render_plots(&results, dir)
}
