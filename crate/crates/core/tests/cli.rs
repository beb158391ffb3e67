use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"{
  "grid": { "n_qubits": 2, "p_phi_list": [0.0, 0.12], "replicates": 3 },
  "bootstrap": { "replicates": 50 }
}"#;

fn aksqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aksqfi")).args(args).output().unwrap()
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.json");
    std::fs::write(&path, SMALL).unwrap();
    path.to_str().unwrap().to_owned()
}

fn grid(config: &str, out: &Path, jobs: &str) -> Output {
    aksqfi(&["grid", "--config", config, "--out", out.to_str().unwrap(), "--jobs", jobs])
}

#[test]
fn grid_writes_csv_and_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out = dir.path().join("a");
    let o = grid(&config, &out, "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["runs.csv", "summary.csv", "trajectories.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let runs = std::fs::read_to_string(out.join("runs.csv")).unwrap();
    assert!(runs.starts_with("# "));
    assert!(runs.contains("# seed: 0"));
    // 2 rules x 2 levels x 3 replicates
    assert_eq!(runs.lines().filter(|l| !l.starts_with('#')).count(), 1 + 12);

    let o = aksqfi(&[
        "report",
        out.join("runs.csv").to_str().unwrap(),
        "--check",
        out.join("summary.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("width_only"));
}

#[test]
fn repeated_grid_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(grid(&config, &a, "1").status.success());
    assert!(grid(&config, &b, "3").status.success());
    for f in ["runs.csv", "summary.csv", "trajectories.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn estimate_prints_one_decision_line() {
    let o = aksqfi(&["estimate", "--n", "2", "--p-phi", "0.06", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("outcome="));
    assert!(text.contains("f_ref="));
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    assert_eq!(aksqfi(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(aksqfi(&["estimate", "--eps", "-1"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{ "grid": { "replicates": 0 } }"#).unwrap();
    assert_eq!(aksqfi(&["grid", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(aksqfi(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let o = aksqfi(&["report", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
