use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn torb(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torb"))
        .args(args)
        .env("TORUS_OUTPUT_DIR", out)
        .env_remove("TORUS_THREADS")
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn resonances_include_the_golden_convergent() {
    let dir = tempfile::tempdir().unwrap();
    let o = torb(&["resonances", "--omega", "golden", "--kmax", "100", "--C", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("resonances.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("-3,5,")).expect("(-3, 5) is listed");
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    assert!((value - (-3.0 + 5.0 * phi)).abs() < 1e-15);
}

#[test]
fn config_round_trips_and_artifacts_are_deterministic() {
    let first = tempfile::tempdir().unwrap();
    let o = torb(&["pendulum-bench", "--points", "9", "--horizon", "20"], first.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let config = fs::read(first.path().join("config.toml")).unwrap();
    let profile = fs::read(first.path().join("action_profile.csv")).unwrap();

    let saved = tempfile::NamedTempFile::new().unwrap();
    fs::write(saved.path(), &config).unwrap();
    let o = torb(&["run", "--config", saved.path().to_str().unwrap()], first.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(first.path().join("config.toml")).unwrap(), config);
    assert_eq!(fs::read(first.path().join("action_profile.csv")).unwrap(), profile);
}

#[test]
fn artifacts_carry_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = torb(&["frame", "--k=-3,5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path());
    let hash = m["config_sha256"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    let frame: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("frame.json")).unwrap()).unwrap();
    assert_eq!(frame["config_sha256"], hash.as_str());
    assert_eq!(frame["symplectic"], true);
    assert_eq!(frame["k_prime"], serde_json::json!([5, 3]));
    for a in m["artifacts"].as_array().unwrap() {
        let name = a["file"].as_str().unwrap();
        if name != "config.toml" {
            assert!(fs::read_to_string(dir.path().join(name)).unwrap().contains(&hash), "{name}");
        }
    }
}

#[test]
fn build_then_norms_from_the_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = torb(&["build", "--k=-3,5", "--diagnostic"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let spec = dir.path().join("spec.json");
    let norms_dir = dir.path().join("norms");
    let o = torb(&["norms", "--spec", spec.to_str().unwrap(), "--r", "0,1"], &norms_dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(norms_dir.join("norms.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert!(values[0] > 0.0 && values[1] >= values[0]);
}

#[test]
fn integrable_fixture_enters() {
    let dir = tempfile::tempdir().unwrap();
    let o = torb(
        &["destroy-check", "--integrable", "--trials", "2", "--intervals", "2000"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("destruction.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "enters");
}

#[test]
fn unresolvable_coupling_exits_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = torb(&["destroy-check", "--trials", "1", "--intervals", "4000"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(dir.path())["exit_code"], 3);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(torb(&["resonances", "--bogus"], dir.path()).status.code(), Some(64));
    assert_eq!(torb(&["frame", "--k", "0,0"], dir.path()).status.code(), Some(2));
    assert_eq!(torb(&["resonances", "--omega", "nonsense"], dir.path()).status.code(), Some(2));
}
