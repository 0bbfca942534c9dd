use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sbcoal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbcoal")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// CSV records with the timing column dropped.
fn records_without_timing(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let wall = headers.iter().position(|h| h == "wall_ms").unwrap();
    reader
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != wall)
                .map(|(_, f)| f.to_string())
                .collect()
        })
        .collect()
}

const ANCESTRY: &str = r#"
experiment = "ancestry_validation"
replicates = 100
window = 50
plants = 20
seeds = 10
exchanged = 2
sample_size = 4
"#;

#[test]
fn same_seed_gives_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "a.toml", ANCESTRY);
    let out = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (o1, o2, o3) = (out("1.csv"), out("2.csv"), out("3.csv"));
    let runs = [
        vec!["ancestry_validation", "--config", &cfg, "--seed", "7", "--out", &o1],
        vec!["ancestry_validation", "--config", &cfg, "--seed", "7", "--out", &o2, "--threads", "3"],
        vec!["ancestry_validation", "--config", &cfg, "--seed", "8", "--out", &o3],
    ];
    for args in &runs {
        let status = sbcoal(args).status.code();
        assert!(matches!(status, Some(0) | Some(1)), "unexpected exit {status:?}");
    }
    let (a, b, c) = (
        records_without_timing(&dir.path().join("1.csv")),
        records_without_timing(&dir.path().join("2.csv")),
        records_without_timing(&dir.path().join("3.csv")),
    );
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn csv_and_json_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "experiment = \"generator_convergence\"\nsizes = [16, 64]\nmonomials = [\"x\", \"x^2\"]\n",
    );
    let csv_path = dir.path().join("g.csv");
    let json_path = dir.path().join("g.json");
    let out = sbcoal(&[
        "generator_convergence",
        "--config",
        &cfg,
        "--out",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("experiment,row,params,estimate,stderr,oracle,tolerance,lower,upper,check,pass,wall_ms\r\n"));
    assert_eq!(records_without_timing(&csv_path).len(), 5);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["experiment"], "generator_convergence");
    assert_eq!(json["passed"], true);
    assert_eq!(json["config"]["sizes"], serde_json::json!([16, 64]));
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "g.toml", "sizes = [16, 64]\nmonomials = [\"y\"]\n");
    let out = sbcoal(&["generator_convergence", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("experiment,row,"));
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn failing_check_exits_one() {
    let dir = TempDir::new().unwrap();
    // shrinking N makes the x^2 error grow instead of shrink
    let cfg = write(dir.path(), "g.toml", "sizes = [64, 16]\nmonomials = [\"x^2\"]\n");
    let out = sbcoal(&["generator_convergence", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let unknown_key = write(dir.path(), "u.toml", "sizes = [16]\nreplicate = 3\n");
    let wrong_experiment = write(dir.path(), "w.toml", "experiment = \"duality\"\n");
    let bad_value = write(dir.path(), "b.toml", "c = -1.0\n");
    let not_toml = write(dir.path(), "n.toml", "sizes = [16\n");
    let missing = dir.path().join("absent.toml").to_string_lossy().into_owned();
    let cases: Vec<Vec<&str>> = vec![
        vec!["generator_convergence", "--config", &unknown_key],
        vec!["generator_convergence", "--config", &wrong_experiment],
        vec!["duality", "--config", &bad_value],
        vec!["generator_convergence", "--config", &not_toml],
        vec!["generator_convergence", "--config", &missing],
        vec!["no_such_experiment", "--config", &bad_value],
        vec!["generator_convergence", "--config", &unknown_key, "--replicates", "0"],
        vec!["generator_convergence"],
    ];
    for args in &cases {
        let out = sbcoal(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?} wrote output");
    }
}
