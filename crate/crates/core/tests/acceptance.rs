//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsnsim_core::election::{weighted_probabilities, Heterogeneity};
use wsnsim_core::engine::invariants::{check_conservation, check_run, CONSERVATION_RTOL};
use wsnsim_core::experiment::{plot_dir, run_batch, ExperimentConfig};
use wsnsim_core::model::{avg_distance_to_bs, total_initial_energy};
use wsnsim_core::radio::{cluster_round_energy, network_round_energy, rx_energy, tx_energy};
use wsnsim_core::{run_simulation, NodeKind, PopulationConfig, Protocol, RadioParams, RegionConfig, SimConfig, Simulation};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn within_time(start: Instant, limit: Duration, detail: String) -> Check {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail} in {:.3}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail} but took {:.3}s (limit {:.0}s)", took.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn round_energy_identity() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = rng.random_range(1..=50usize);
        let n = k * rng.random_range(1..=40usize) + rng.random_range(0..k);
        let radio = RadioParams {
            e_elec: rng.random_range(1e-9..1e-7),
            eps_fs: rng.random_range(1e-12..1e-10),
            eps_mp: rng.random_range(1e-16..1e-14),
            e_da: rng.random_range(1e-9..1e-8),
            d0: rng.random_range(10.0..200.0),
            msg_bits: rng.random_range(1..100_000),
        };
        let d_bs = rng.random_range(0.0..300.0);
        let d_ch = rng.random_range(0.0..100.0);
        let lhs = k as f64 * cluster_round_energy(&radio, n, k, d_bs, d_ch);
        let rhs = network_round_energy(&radio, n, k, d_bs, d_ch);
        worst = worst.max(rel_err(lhs, rhs));
    }
    if worst > 1e-12 {
        return Err(format!("max relative error {worst:e} > 1e-12"));
    }
    within_time(start, Duration::from_secs(1), format!("1000 tuples, max rel err {worst:.2e}"))
}

fn hand_values() -> Check {
    let radio = RadioParams::default();
    let pop = PopulationConfig::default();
    let (p_nrm, p_adv) = weighted_probabilities(
        &Default::default(),
        Heterogeneity {
            alpha: 1.0,
            m_fraction: 0.1,
        },
    );
    let cases = [
        ("tx(4000, 50 m)", tx_energy(&radio, 4000, 50.0), 3.0e-4),
        ("tx(4000, 100 m)", tx_energy(&radio, 4000, 100.0), 7.2e-4),
        ("rx(4000)", rx_energy(&radio, 4000), 2.0e-4),
        ("total initial energy", total_initial_energy(&pop), 55.0),
        ("avg distance to BS", avg_distance_to_bs(&RegionConfig::default()), 38.25),
        ("p_nrm", p_nrm, 1.0 / 11.0),
        ("p_adv", p_adv, 2.0 / 11.0),
    ];
    let bad: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| rel_err(*got, *want) > 1e-12)
        .map(|(name, got, want)| format!("{name}: {got:e} != {want:e}"))
        .collect();
    if bad.is_empty() {
        Ok(format!("{} values within 1e-12", cases.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn conservation() -> Check {
    let start = Instant::now();
    let config = SimConfig::default();
    let mut rounds = 0;
    for protocol in Protocol::ALL {
        for seed in 1..=5 {
            let history = run_simulation(&config, protocol, seed, 5000).map_err(|e| e.to_string())?;
            check_conservation(&history, CONSERVATION_RTOL).map_err(|v| format!("{protocol} seed {seed}: {v}"))?;
            rounds += history.records.len();
        }
    }
    within_time(start, Duration::from_secs(5), format!("15 runs, {rounds} rounds conserve energy"))
}

fn election_rates() -> Check {
    const ROUNDS: u32 = 2000;
    let config = SimConfig::default();
    let alpha = config.population.alpha;

    let leach = Simulation::new(&config, Protocol::Leach, 1)
        .and_then(|s| s.immortal().run(ROUNDS))
        .map_err(|e| e.to_string())?;
    let leach_mean =
        leach.outcomes.iter().map(|o| o.cluster_heads().len()).sum::<usize>() as f64 / leach.outcomes.len() as f64;

    let sep = Simulation::new(&config, Protocol::Sep, 1)
        .and_then(|s| s.immortal().run(ROUNDS))
        .map_err(|e| e.to_string())?;
    let n = sep.n_nodes() as f64;
    let mut heads_by_kind: BTreeMap<NodeKind, usize> = BTreeMap::new();
    for o in &sep.outcomes {
        for &h in o.cluster_heads() {
            *heads_by_kind.entry(sep.network.nodes[h].kind).or_default() += 1;
        }
    }
    let total_heads: usize = heads_by_kind.values().sum();
    let sep_fraction = total_heads as f64 / (n * sep.outcomes.len() as f64);
    let count = |k| sep.network.nodes.iter().filter(|x| x.kind == k).count() as f64;
    let rate = |k| heads_by_kind.get(&k).copied().unwrap_or(0) as f64 / count(k);
    let ratio = rate(NodeKind::Advanced) / rate(NodeKind::Normal);

    let detail = format!("LEACH mean CHs {leach_mean:.3}, SEP CH fraction {sep_fraction:.4}, SEP adv:normal {ratio:.3}");
    let ok = (leach_mean - 10.0).abs() <= 1.0
        && rel_err(sep_fraction, 0.1) <= 0.10
        && (ratio - (1.0 + alpha)).abs() <= 0.15 * (1.0 + alpha);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn structural_invariants() -> Check {
    let config = SimConfig::default();
    let mut runs = 0;
    for protocol in Protocol::ALL {
        for seed in 1..=5 {
            let history = run_simulation(&config, protocol, seed, 5000).map_err(|e| e.to_string())?;
            check_run(&history, &config.radio).map_err(|v| format!("{protocol} seed {seed}: {v}"))?;
            let s = wsnsim_core::summarize(history.n_nodes(), &history.records).map_err(|e| e.to_string())?;
            let milestones = [s.first_node_death_round, s.half_node_death_round, s.last_node_death_round];
            let defined: Vec<u32> = milestones.iter().flatten().copied().collect();
            if defined.windows(2).any(|w| w[0] > w[1]) {
                return Err(format!("{protocol} seed {seed}: milestones out of order {milestones:?}"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} full histories validated"))
}

fn median(mut v: Vec<u32>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        f64::from(v[n / 2])
    } else {
        0.5 * (f64::from(v[n / 2 - 1]) + f64::from(v[n / 2]))
    }
}

fn lifetime_ordering() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ExperimentConfig {
        protocols: vec![Protocol::Emeedp, Protocol::Leach],
        seeds: (1..=30).collect(),
        output_dir: dir.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    let batch = run_batch(&config).map_err(|e| e.to_string())?;
    let med = |p, f: fn(&wsnsim_core::SummaryStats) -> Option<u32>| {
        median(batch.runs_for(p).map(|r| f(&r.summary).unwrap_or(config.max_rounds)).collect())
    };
    let fnd = |s: &wsnsim_core::SummaryStats| s.first_node_death_round;
    let lnd = |s: &wsnsim_core::SummaryStats| s.last_node_death_round;
    let (fe, fl) = (med(Protocol::Emeedp, fnd), med(Protocol::Leach, fnd));
    let (le, ll) = (med(Protocol::Emeedp, lnd), med(Protocol::Leach, lnd));
    let detail = format!("median FND emeedp {fe} vs leach {fl}; median LND emeedp {le} vs leach {ll}");
    if fe >= fl && le >= ll {
        within_time(start, Duration::from_secs(60), detail)
    } else {
        Err(detail)
    }
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        out.insert(name, fs::read(entry.path()).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ExperimentConfig {
        seeds: vec![1, 2, 3],
        output_dir: dir.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    let mut snaps = Vec::new();
    for _ in 0..2 {
        run_batch(&config).map_err(|e| e.to_string())?;
        plot_dir(dir.path()).map_err(|e| e.to_string())?;
        snaps.push(snapshot(dir.path())?);
        for f in fs::read_dir(dir.path()).map_err(|e| e.to_string())? {
            fs::remove_file(f.map_err(|e| e.to_string())?.path()).map_err(|e| e.to_string())?;
        }
    }
    let svgs = snaps[0].keys().filter(|k| k.ends_with(".svg")).count();
    if snaps[0] != snaps[1] {
        let differing: Vec<&String> = snaps[0].keys().filter(|k| snaps[0].get(*k) != snaps[1].get(*k)).collect();
        return Err(format!("files differ: {differing:?}"));
    }
    if svgs != 3 {
        return Err(format!("expected 3 SVGs, found {svgs}"));
    }
    Ok(format!("{} files byte-identical across two runs", snaps[0].len()))
}

fn scale() -> Check {
    let config = SimConfig::default();
    let start = Instant::now();
    let history = Simulation::new(&config, Protocol::Emeedp, 1)
        .and_then(|s| s.immortal().run(5000))
        .map_err(|e| e.to_string())?;
    if history.records.len() != 5000 {
        return Err(format!("ran {} rounds", history.records.len()));
    }
    within_time(start, Duration::from_secs(1), "100 nodes x 5000 rounds".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("round-energy identity", round_energy_identity),
        ("hand-evaluated values", hand_values),
        ("energy conservation", conservation),
        ("election rates", election_rates),
        ("structural invariants", structural_invariants),
        ("lifetime ordering", lifetime_ordering),
        ("determinism", determinism),
        ("scale", scale),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("AC{} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
