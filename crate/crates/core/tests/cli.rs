use std::path::Path;
use std::process::{Command, Output};

use hamlearn::harness::{read_rows, Summary};

fn hamlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamlearn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &str = r#"{"preset": "generic", "n_qubits": 2, "m_terms": 2, "num_instances": 3, "seed": 5,
  "solve": {"max_restarts": 500}}"#;

#[test]
fn exp_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let out_path = dir.path().join("rows.jsonl");
    let out = hamlearn(&["exp", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_rows(&out_path).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r.instance_id).collect::<Vec<_>>(), vec![0, 1, 2]);
    let summary: Summary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rows.jsonl.summary.json")).unwrap()).unwrap();
    assert_eq!(summary.rows, 3);
    assert_eq!(summary.converged, 3);
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.jsonl");
    let out_path = out_path.to_str().unwrap();

    let cfg = write(dir.path(), "zero.json", r#"{"preset": "generic", "n_qubits": 2, "m_terms": 2, "num_instances": 0}"#);
    let out = hamlearn(&["exp", "--config", &cfg, "--out", out_path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("num_instances"), "{}", stderr(&out));

    let cfg = write(dir.path(), "typo.json", r#"{"preset": "generic", "n_qubit": 2}"#);
    assert_eq!(hamlearn(&["exp", "--config", &cfg, "--out", out_path]).status.code(), Some(1));

    let cfg = write(dir.path(), "lattice.json", r#"{"preset": "local_chain", "n_qubits": 3, "m_terms": 4}"#);
    let out = hamlearn(&["exp", "--config", &cfg, "--out", out_path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("m_terms"));

    let cfg = write(dir.path(), "wolfe.json", r#"{"preset": "generic", "n_qubits": 2, "m_terms": 1, "solve": {"wolfe_c1": 0.95}}"#);
    let out = hamlearn(&["exp", "--config", &cfg, "--out", out_path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("wolfe"));

    let cfg = write(dir.path(), "small.json", SMALL);
    assert_eq!(hamlearn(&["--threads", "0", "exp", "--config", &cfg, "--out", out_path]).status.code(), Some(1));
    assert_eq!(hamlearn(&["exp", "--config", "/nonexistent.json", "--out", out_path]).status.code(), Some(1));
}

#[test]
fn unconverged_runs_exit_with_two_and_keep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "starved.json",
        r#"{"preset": "local_full", "n_qubits": 3, "num_instances": 2, "seed": 1,
            "solve": {"max_restarts": 1, "max_iters": 2}}"#,
    );
    let out_path = dir.path().join("rows.jsonl");
    let summary = dir.path().join("summary.json");
    let out = hamlearn(&[
        "exp",
        "--config",
        &cfg,
        "--out",
        out_path.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let rows = read_rows(&out_path).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r.converged));
    assert!(summary.exists());
}

#[test]
fn gen_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "gen.json",
        r#"{"preset": "level_sweep", "n_qubits": 2, "seed": 3, "solve": {"max_restarts": 2000}}"#,
    );
    let data = dir.path().join("data");
    let out = hamlearn(&["gen", "--config", &cfg, "--out", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for k in 0..4 {
        assert!(data.join(format!("measurements_{k}.json")).exists());
    }
    assert!(data.join("basis_0.json").exists());
    assert!(!data.join("basis_1.json").exists());

    let row = dir.path().join("row.csv");
    let out = hamlearn(&[
        "--format",
        "csv",
        "solve",
        "--basis",
        data.join("basis_0.json").to_str().unwrap(),
        "--measurements",
        data.join("measurements_2.json").to_str().unwrap(),
        "--config",
        &cfg,
        "--out",
        row.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let solution: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(solution["labels"].as_array().unwrap().len(), 1);
    assert_eq!(solution["converged"], true);
    let rows = read_rows(&row).unwrap();
    assert_eq!(rows[0].eigen_index, Some(2));
    assert!(rows[0].abs_fidelity.unwrap() > 0.999);

    let out = hamlearn(&["summarize", "--in", row.to_str().unwrap(), "--bins", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Summary = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary.histogram.counts.len(), 5);
}

#[test]
fn custom_preset_reads_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gen.json", r#"{"preset": "local_chain", "n_qubits": 3, "seed": 8}"#);
    let data = dir.path().join("data");
    assert_eq!(hamlearn(&["gen", "--config", &cfg, "--out", data.to_str().unwrap()]).status.code(), Some(0));
    let custom = format!(
        r#"{{"preset": "custom", "basis_path": {:?}, "measurements_path": {:?}, "solve": {{"max_restarts": 3000, "init_scale_max": 30.0, "init_gap_max": 10.0}}}}"#,
        data.join("basis_0.json"),
        data.join("measurements_0.json")
    );
    let cfg = write(dir.path(), "custom.json", &custom);
    let out_path = dir.path().join("rows.jsonl");
    let out = hamlearn(&["exp", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_rows(&out_path).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].abs_fidelity.unwrap() > 0.999);
}

#[test]
fn seed_flag_controls_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let out = hamlearn(&["--seed", seed, "--threads", "1", "exp", "--config", &cfg, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let rows = read_rows(&path).unwrap();
        hamlearn::harness::jsonl_without_timing(&rows).unwrap()
    };
    let a = run("9", "a.jsonl");
    let b = run("9", "b.jsonl");
    let c = run("10", "c.jsonl");
    assert_eq!(a, b);
    assert_ne!(a, c);
}
