//! The command-line binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inclusion_lab::discretize::{assemble, Grid};
use inclusion_lab::equilibria::Equilibrium;
use inclusion_lab::inclusion::{simulate, SolverConfig};
use inclusion_lab::io::read_trajectory;
use inclusion_lab::spectral::perturbation_direction;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_inclusion-lab"));
    c.env_remove("INCLUSION_LAB_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

const CONFIG: &str = r#"{
  "n": 2,
  "sign": "+",
  "perturbation": {"kind": "eigen", "index": 1, "amplitude": 1e-4},
  "grid": {"M": 32},
  "dt": 1e-3,
  "t_end": 0.25,
  "record_stride": 10
}"#;

#[test]
fn simulate_round_trips_through_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.json", CONFIG);
    let out = tmp.path().join("out");
    let o = run(&["simulate", "--config", &cfg, "--snapshots", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let ops = assemble(&Grid::new(2, 32).unwrap());
    let eq = Equilibrium::plus(2);
    let w = perturbation_direction(2, 1, &ops).unwrap();
    let u0: Vec<f64> = eq.sample(&ops.grid).iter().zip(&w).map(|(a, b)| a + 1e-4 * b).collect();
    let cfg = SolverConfig::new(1e-3, 0.25).unwrap().with_stride(10).unwrap();
    let expected = simulate(&u0, &cfg, &ops, eq).unwrap();

    let back = read_trajectory(&out, eq).unwrap();
    assert_eq!(back, expected);
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("trajectory.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], expected.len());
    assert_eq!(meta["config"]["selection_tolerance"], 1e-14);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.json", CONFIG);
    let params = write(tmp.path(), "decay.json", r#"{"t_end": 0.5}"#);
    let dirs: Vec<_> = (0..2).map(|k| tmp.path().join(format!("run{k}"))).collect();
    for d in &dirs {
        let d = d.to_str().unwrap();
        assert_eq!(run(&["simulate", "--config", &cfg, "--snapshots", "--out", d]).status.code(), Some(0));
        assert_eq!(run(&["verify", "--experiment", "decay", "--params", &params, "--out", d]).status.code(), Some(0));
        assert_eq!(run(&["spectrum", "--n", "3", "--count", "5", "--out", d]).status.code(), Some(0));
    }
    let (a, b) = (sorted_files(&dirs[0]), sorted_files(&dirs[1]));
    assert!(a.len() > 5);
    assert_eq!(a, b);
}

#[test]
fn spectrum_and_zero_mode_on_stdout() {
    let o = run(&["spectrum", "--n", "2", "--count", "8", "--method", "shooting"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["negative_count"], 1);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 8);

    let o = run(&["zero-mode", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let det = text.lines().find_map(|l| l.strip_prefix("determinant,")).unwrap();
    assert_eq!(det.parse::<f64>().unwrap(), -1.0);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.json");
    for args in [
        vec!["zero-mode", "--n", "0"],
        vec!["spectrum", "--n", "0"],
        vec!["simulate", "--config", missing.to_str().unwrap()],
        vec!["frobnicate"],
        vec!["spectrum", "--n", "2", "--bogus"],
        vec!["equilibria", "--n", "2", "--sign", "x"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let bad = write(tmp.path(), "bad.json", r#"{"n": 2, "dt": -1}"#);
    assert_eq!(run(&["simulate", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().to_str().unwrap();
    let o = run(&["verify", "--experiment", "growth", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("report_growth.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    assert!(report["measurements"].as_array().unwrap().iter().all(|m| m.get("window").is_some()));

    let strict = write(tmp.path(), "strict.json", r#"{"relative_tolerance": 1e-9}"#);
    assert_eq!(run(&["verify", "--experiment", "growth", "--params", &strict, "--out", d]).status.code(), Some(1));

    let short = write(tmp.path(), "short.json", r#"{"t_end": 0.01}"#);
    assert_eq!(run(&["verify", "--experiment", "connect", "--params", &short, "--out", d]).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin().env("INCLUSION_LAB_OUT", tmp.path()).args(["zero-mode", "--n", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(tmp.path().join("zero_mode_n3.csv").exists());
}
