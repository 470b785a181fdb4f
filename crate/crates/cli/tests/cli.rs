use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ergodiclab"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(kind: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(kind)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn shipped_configs_run_clean() {
    let dir = TempDir::new().unwrap();
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let kind = text
            .split("\"kind\"")
            .nth(1)
            .and_then(|rest| rest.split('"').nth(1))
            .unwrap()
            .to_string();
        let out = dir.path().join(path.file_stem().unwrap()).with_extension("csv");
        let o = run(&kind, &path, &out, &["--threads", "2"]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(&out).unwrap();
        assert!(csv.starts_with("N,weak_error,strong_error,bound,seconds\n"));
        assert!(dir.path().join(path.file_stem().unwrap()).with_extension("config.json").exists());
    }
}

#[test]
fn same_bytes_at_one_and_eight_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = configs_dir().join("entangled_haar.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run("entangled", &cfg, &a, &["--threads", "1"]).status.success());
    assert!(run("entangled", &cfg, &b, &["--threads", "8"]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_echo_reruns_to_the_same_csv() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first.csv");
    let o = run("adjoint", &configs_dir().join("adjoint_haar.json"), &first, &[]);
    assert!(o.status.success());
    let echo = dir.path().join("first.config.json");
    let second = dir.path().join("second.csv");
    assert!(run("adjoint", &echo, &second, &[]).status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn measure_gn_rows_are_one_over_n() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.csv");
    assert!(run("measure-gn", &configs_dir().join("measure_gn_cos.json"), &out, &[]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let n: f64 = cols[0].parse().unwrap();
        let weak: f64 = cols[1].parse().unwrap();
        assert!((weak - 1.0 / n).abs() < 1e-12, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 9);
}

#[test]
fn kind_mismatch_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = run("adjoint", &configs_dir().join("measure_gn_cos.json"), &dir.path().join("x.csv"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`kind`"));
}

#[test]
fn schema_errors_exit_two_with_field_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"schema_version": 1, "kind": "mean-ergodic", "dimension": 2,
            "schedule": {"points": [8, 8]}}"#,
    );
    let out = dir.path().join("x.csv");
    let o = run("mean-ergodic", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule.points"));
    assert!(!out.exists());
}

#[test]
fn budget_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "big.json",
        r#"{"schema_version": 1, "kind": "entangled", "dimension": 4, "spectrum": {"type": "haar"},
            "partition": [1, 2, 3, 4],
            "operators": [{"type": "haar"}, {"type": "haar"}, {"type": "haar"}],
            "schedule": {"points": [4096]}}"#,
    );
    let o = run("entangled", &cfg, &dir.path().join("x.csv"), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn rows_over_the_bound_exit_one_but_keep_the_csv() {
    let dir = TempDir::new().unwrap();
    // Full periods make the bound exactly zero; rounding leaves ~1e-13.
    let cfg = write_config(
        &dir,
        "tight.json",
        r#"{"schema_version": 1, "kind": "power-chain", "seed": 3,
            "spectrum": {"type": "explicit", "turns": [0, 0.25, 0.5, 0.75], "basis": "haar"},
            "exponents": [1, 1], "operators": [{"type": "haar"}],
            "schedule": {"points": [4096]}, "tolerance": 0}"#,
    );
    let out = dir.path().join("x.csv");
    let o = run("power-chain", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn describe_prints_resonances() {
    let o = bin()
        .args(["entangled", "--describe", "--config"])
        .arg(configs_dir().join("entangled_haar.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("resonance count:"));
    assert!(text.contains("limit formula:"));
    assert!(text.contains("partition: {1,2,1,2}"));
}

#[test]
fn missing_out_without_describe_is_rejected() {
    let o = bin()
        .args(["adjoint", "--config"])
        .arg(configs_dir().join("adjoint_haar.json"))
        .output()
        .unwrap();
    assert!(!o.status.success());
}
