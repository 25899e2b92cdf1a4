use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn scrambling(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scrambling"));
    cmd.args(args).env_remove("SCRAMBLING_WORKERS");
    if let Some(w) = workers {
        cmd.env("SCRAMBLING_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn echo_config() -> Value {
    json!({
        "kind": "echo-grid",
        "seed": 20,
        "spin_bath": {"n_bath": 6},
        "t1": {"start": 0, "stop": 40, "count": 20},
        "t2": {"start": 0, "stop": 40, "count": 20},
        "initial": [0, 0, 1],
        "alice": [0, 0, 1]
    })
}

/// Runs one experiment and returns `(sha256, path)` per output line.
fn run_ok(args: &[&str], workers: Option<&str>) -> Vec<(String, String)> {
    let out = scrambling(args, workers);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (h, p) = l.split_once("  ").unwrap();
            (h.to_owned(), p.to_owned())
        })
        .collect()
}

fn data_hashes(lines: &[(String, String)]) -> Vec<String> {
    lines.iter().filter(|(_, p)| !p.ends_with("_manifest.json")).map(|(h, _)| h.clone()).collect()
}

#[test]
fn echo_grid_smoke_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "echo.json", &echo_config());
    let prefix = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();

    let a = run_ok(&["echo-grid", "--config", &cfg, "--out", &prefix("a")], None);
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t1,t2,prob"));
    assert_eq!(lines.count(), 400);
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.path().join("a_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "echo-grid");
    assert_eq!(manifest["config"]["seed"], 20);

    let b = run_ok(&["echo-grid", "--config", &cfg, "--out", &prefix("b")], None);
    assert_eq!(data_hashes(&a), data_hashes(&b));

    let c = run_ok(&["echo-grid", "--config", &cfg, "--out", &prefix("c"), "--seed", "21"], None);
    assert_ne!(data_hashes(&a), data_hashes(&c));
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let fluct = write_config(
        dir.path(),
        "fluct.json",
        &json!({"kind": "fluctuation-scaling", "seed": 3, "qubits": [3, 4, 5], "layers": 20, "samples": 40}),
    );
    let classical = write_config(
        dir.path(),
        "classical.json",
        &json!({"kind": "classical-butterfly", "seed": 5, "n_bath": 6, "t1": 2.0, "dt": 0.01, "stride": 10, "ensemble": 8}),
    );
    for (kind, cfg) in [("fluctuation-scaling", &fluct), ("classical-butterfly", &classical)] {
        let p1 = dir.path().join(format!("{kind}_1")).to_str().unwrap().to_owned();
        let p2 = dir.path().join(format!("{kind}_2")).to_str().unwrap().to_owned();
        let one = run_ok(&[kind, "--config", cfg, "--out", &p1, "--workers", "1"], None);
        let two = run_ok(&[kind, "--config", cfg, "--out", &p2], Some("2"));
        assert!(!data_hashes(&one).is_empty());
        assert_eq!(data_hashes(&one), data_hashes(&two), "{kind}");
    }
}

#[test]
fn bad_invocations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let mut no_seed = echo_config();
    no_seed.as_object_mut().unwrap().remove("seed");
    let path = write_config(dir.path(), "no_seed.json", &no_seed);
    let out = scrambling(&["echo-grid", "--config", &path], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let path = write_config(dir.path(), "echo.json", &echo_config());
    let out = scrambling(&["recover", "--config", &path], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("echo-grid"));

    let mut typo = echo_config();
    typo["spin_bath"]["nbath"] = json!(4);
    let path = write_config(dir.path(), "typo.json", &typo);
    let out = scrambling(&["echo-grid", "--config", &path], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("spin_bath"));

    let out = scrambling(&["not-a-kind", "--config", &path], None);
    assert!(!out.status.success());
}
