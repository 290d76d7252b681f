use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wsnsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsnsim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_csvs_summary_manifest_and_charts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &format!(
            "protocols = [\"emeedp\", \"sep\"]\nseeds = [4]\nmax_rounds = 300\noutput_dir = {:?}\n[population]\nn = 25\n",
            out.to_string_lossy()
        ),
    );
    let o = wsnsim(&["run", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "alive_nodes.svg",
            "cumulative_packets.svg",
            "emeedp_seed4.csv",
            "manifest.toml",
            "residual_energy.svg",
            "sep_seed4.csv",
            "summary.csv"
        ]
    );

    fs::remove_file(out.join("alive_nodes.svg")).unwrap();
    let o = wsnsim(&["plot", &out.to_string_lossy()]);
    assert!(o.status.success());
    assert!(out.join("alive_nodes.svg").exists());
}

#[test]
fn overrides_replace_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(dir.path(), "seeds = [1, 2]\n[population]\nn = 10\n");
    let o = wsnsim(&[
        "run",
        &cfg,
        "--seed",
        "9",
        "--protocol",
        "leach",
        "--rounds",
        "50",
        "--output",
        &out.to_string_lossy(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.lines().nth(1).unwrap().starts_with("leach,9,"));
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("max_rounds = 50"));
}

#[test]
fn validate_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = wsnsim(&["validate", &cfg]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("e0 = 0.5"));
    assert!(text.contains("msg_bits = 4000"));
}

#[test]
fn invalid_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[population]\ne0 = -1.0\n");
    let o = wsnsim(&["validate", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("e0"));

    let o = wsnsim(&["validate", &dir.path().join("missing.toml").to_string_lossy()]);
    assert!(!o.status.success());

    let o = wsnsim(&["run", &write_config(dir.path(), ""), "--rounds", "0"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_rounds"));
}

#[test]
fn plot_without_results_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = wsnsim(&["plot", &dir.path().to_string_lossy()]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_protocol_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = wsnsim(&["validate", &write_config(dir.path(), ""), "--protocol", "pegasis"]);
    assert!(!o.status.success());
}
