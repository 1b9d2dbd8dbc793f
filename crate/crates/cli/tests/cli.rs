use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"{
    "instance": {"kind": "soare", "d": 3, "omega": 0.3},
    "algorithms": [{"name": "g_bai"}, {"name": "p1_rage", "m": 4}],
    "T": 120,
    "trials": 30,
    "sweep": {"param": "T", "values": [60, 120]}
}"#;

fn bai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bai")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn list_presets() {
    let out = bai(&["list-presets"]);
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    assert_eq!(names.lines().count(), 8);
    assert!(names.lines().any(|l| l == "malicious"));
}

#[test]
fn run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let csv = dir.path().join("out.csv");
    let out = bai(&["run", "--config", &config, "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], linbai_core::harness::CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("soare,T,60,g_bai,30,"));
    assert!(lines[4].starts_with("soare,T,120,p1_rage,30,"));
}

#[test]
fn output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let csv = dir.path().join(format!("out{threads}.csv"));
        let out = bai(&["run", "--config", &config, "--threads", threads, "--seed", "4", "--out", csv.to_str().unwrap()]);
        assert!(out.status.success());
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn trials_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let csv = dir.path().join("out.csv");
    let out = bai(&["run", "--config", &config, "--trials", "7", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("7")));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let csv = csv.to_str().unwrap();
    let bad = write_config(dir.path(), &SMALL.replace("g_bai", "h_bai"));
    assert_eq!(bai(&["run", "--config", &bad, "--out", csv]).status.code(), Some(2));
    assert_eq!(bai(&["run", "--config", "/nonexistent/config.json", "--out", csv]).status.code(), Some(2));
    let out = bai(&["preset", "nope", "--out", csv]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("soare_stationary"));
    assert_eq!(bai(&["run"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = bai(&["run", "--config", &config, "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3));

    // Mixed-Peace cannot split T = 1 into phases: the row fails, the rest is written.
    let config = write_config(
        dir.path(),
        &SMALL.replace("\"p1_rage\", \"m\": 4", "\"mixed_peace\"").replace("[60, 120]", "[1, 120]"),
    );
    let csv = dir.path().join("partial.csv");
    let out = bai(&["run", "--config", &config, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(2).unwrap().ends_with(",,,,,,"));
}

#[test]
fn preset_print_config_round_trips() {
    let out = bai(&["preset", "malicious", "--print-config", "--trials", "12"]);
    assert!(out.status.success());
    let config = linbai_core::ExperimentConfig::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!((config.horizon, config.trials), (10_000, 12));
}

#[test]
fn complexity_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = bai(&["complexity", "--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let cells: Vec<&str> = lines[1].split(',').collect();
    let gap: f64 = cells[3].parse().unwrap();
    let h_gbai: f64 = cells[4].parse().unwrap();
    assert!((h_gbai - 3.0 / (gap * gap)).abs() < 1e-9 * h_gbai);
    assert_eq!(cells[6], "4");
}
