//! End-to-end checks of the installed binary: exit codes, output wording,
//! and flag handling.

use std::path::Path;
use std::process::{Command, Output};

fn duelbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duelbandit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

#[test]
fn list_prints_the_datasets() {
    let out = duelbandit(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["six_rankers", "cyclic", "arithmetic", "example1"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("six.csv");
    write(&good, &duelbandit::preference::six_rankers().to_csv());
    let out = duelbandit(&["validate", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid, K=6, Condorcet winner: 1"));

    let no_winner = dir.path().join("cycle.csv");
    write(&no_winner, "0.5,0.6,0.4\n0.4,0.5,0.6\n0.6,0.4,0.5\n");
    let out = duelbandit(&["validate", no_winner.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("no Condorcet winner"));

    let malformed = dir.path().join("bad.csv");
    write(&malformed, "0.5,x\n0.5,0.5\n");
    let out = duelbandit(&["validate", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"));

    let out = duelbandit(&["validate", "does_not_exist.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_reports_bounds_and_errors() {
    let out = duelbandit(&["analyze", "example1", "--q", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("TrueLB coefficient: 2.43063932173594"));
    assert!(text.contains("Condorcet winner: 1"));

    // missing q is a usage error
    let out = duelbandit(&["analyze", "example1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("requires q"));

    // a matrix without a winner cannot be analyzed
    let dir = tempfile::tempdir().unwrap();
    let no_winner = dir.path().join("cycle.csv");
    write(&no_winner, "0.5,0.6,0.4\n0.4,0.5,0.6\n0.6,0.4,0.5\n");
    let out = duelbandit(&["analyze", no_winner.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Condorcet"));
}

#[test]
fn run_validates_config_and_executes() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.json");
    let out_dir = dir.path().join("results");
    write(
        &config_path,
        &format!(
            r#"{{
  "dataset": {{"source": "builder", "name": "cyclic"}},
  "policies": [
    {{"algo": "rmed1"}},
    {{"algo": "rmed2fh", "alpha": 3.0}}
  ],
  "horizon": 500,
  "runs": 2,
  "base_seed": 9,
  "output": "{}"
}}"#,
            out_dir.display()
        ),
    );

    let out = duelbandit(&["run", config_path.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(out_dir.join("rmed1-c0.3-eps0.01.csv").is_file());
    assert!(out_dir.join("rmed2fh-c0.3-eps0.01-alpha3.csv").is_file());

    // --print-config echoes a reparseable config and runs nothing
    let out = duelbandit(&["run", config_path.to_str().unwrap(), "--print-config"]);
    assert_eq!(out.status.code(), Some(0));
    let echoed: duelbandit_cli::config::ExperimentConfig =
        serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(echoed.horizon, 500);

    // bad JSON is a usage error
    let broken = dir.path().join("broken.json");
    write(&broken, "{ not json");
    let out = duelbandit(&["run", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // config errors are listed exhaustively
    let invalid = dir.path().join("invalid.json");
    write(
        &invalid,
        r#"{
  "dataset": {"source": "builder", "name": "cyclic"},
  "policies": [{"algo": "rucb", "alpha": -2.0}],
  "horizon": 0,
  "runs": 0,
  "base_seed": 0,
  "output": "x"
}"#,
    );
    let out = duelbandit(&["run", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    for needle in ["runs", "horizon", "alpha"] {
        assert!(err.contains(needle), "missing '{needle}' in: {err}");
    }
}

#[test]
fn threads_env_var_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "dataset": {{"source": "builder", "name": "cyclic"}},
  "policies": [{{"algo": "rmed1"}}],
  "horizon": 100,
  "runs": 1,
  "base_seed": 0,
  "output": "{}"
}}"#,
            dir.path().join("out").display()
        ),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_duelbandit"))
        .args(["run", config_path.to_str().unwrap()])
        .env("DUELBANDIT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_duelbandit"))
        .args(["run", config_path.to_str().unwrap()])
        .env("DUELBANDIT_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // the flag wins over a broken environment value
    let out = Command::new(env!("CARGO_BIN_EXE_duelbandit"))
        .args(["run", config_path.to_str().unwrap(), "--threads", "1"])
        .env("DUELBANDIT_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn shipped_configs_are_valid() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let out = duelbandit(&["run", path.to_str().unwrap(), "--print-config"]);
        assert_eq!(out.status.code(), Some(0), "{}", path.display());
        let cfg: duelbandit_cli::config::ExperimentConfig =
            serde_json::from_str(&stdout(&out)).unwrap();
        assert!(
            duelbandit_cli::config::validate(&cfg).is_empty(),
            "{} has validation issues",
            path.display()
        );
    }
    assert!(seen >= 3, "expected the shipped example configs");
}

#[test]
fn usage_errors_exit_one() {
    let out = duelbandit(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = duelbandit(&[]);
    assert_eq!(out.status.code(), Some(1));
    let out = duelbandit(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
