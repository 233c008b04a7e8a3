use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qpco(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpco"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn result_of(path: &Path) -> Value {
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(doc["meta"]["config_sha256"].as_str().unwrap().len() == 64);
    doc["result"].clone()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn free_scan_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpco(
        dir.path(),
        &[
            "scan-lyapunov",
            "--set",
            "model.K=0",
            "--set",
            "lyapunov.n=10000",
            "--set",
            "lyapunov.phases=8",
            "--set",
            "lyapunov.e_step=0.5",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("lyapunov.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# qpco scan-lyapunov config_sha256="));
    assert_eq!(lines.next().unwrap(), "E,omega_id,K,n,phases,L,stderr");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 15);
    for r in rows {
        let e: f64 = r[0].parse().unwrap();
        let l: f64 = r[5].parse().unwrap();
        let t = (2.0 - e).abs();
        let exact = if t <= 2.0 {
            0.0
        } else {
            ((t + (t * t - 4.0).sqrt()) / 2.0).ln()
        };
        assert!((l - exact).abs() < 5e-3, "E={e}: {l} vs {exact}");
    }
    assert!(dir.path().join("lyapunov.svg").exists());
}

#[test]
fn seed_changes_random_phases_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let o = qpco(
            dir.path(),
            &[
                "spectrum",
                "--seed",
                seed,
                "--set",
                "model.K=2",
                "--set",
                "spectrum.N=200",
                "--set",
                "spectrum.thetas=2",
                "--set",
                "spectrum.random_thetas=true",
                "--set",
                "output.plots=false",
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
        data_rows(&csv)[0][0].clone()
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
    assert!(!dir.path().join("ladder.svg").exists());
}

#[test]
fn reduce_free_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpco(
        dir.path(),
        &[
            "reduce",
            "--set",
            "model.K=0",
            "--set",
            "reduce.n=2000",
            "--set",
            "reduce.phases=4",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result_of(&dir.path().join("conjugation.json"));
    assert_eq!(r["k_hat"].as_f64().unwrap(), -1.0);
    for key in ["hom1", "hom2", "conj"] {
        assert!(r["residuals"][key].as_f64().unwrap() < 1e-10);
    }
    let probe = fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    assert_eq!(data_rows(&probe).len(), 10);
}

#[test]
fn classify_liouville() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpco(
        dir.path(),
        &[
            "classify-freq",
            "--set",
            "model.omega=\"liouville:45\"",
            "--set",
            "model.K=1",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result_of(&dir.path().join("classify.json"));
    assert_eq!(r["criterion"]["criterion_met"], Value::Bool(true));
    assert!(r["criterion"]["caveat"].is_string());
}

#[test]
fn gordon_probe_reports_skipped_stages() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpco(
        dir.path(),
        &[
            "gordon-probe",
            "--set",
            "model.omega=\"liouville:45\"",
            "--set",
            "model.K=0.5",
            "--set",
            "gordon.stages=[9, 10, 11, 12]",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result_of(&dir.path().join("gordon.json"));
    assert!(r["criterion_met"].as_bool().unwrap());
    let rows = r["per_scale"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|row| row["ch_quantity"].as_f64().unwrap() >= 0.5));
    assert!(!r["skipped_stages"].as_array().unwrap().is_empty());
}

#[test]
fn phase_diagram_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpco(
        dir.path(),
        &[
            "phase-diagram",
            "--set",
            "phase_diagram.K_list=[0, 2]",
            "--set",
            "phase_diagram.e_step=2",
            "--set",
            "phase_diagram.n=1000",
            "--set",
            "phase_diagram.phases=2",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    assert_eq!(data_rows(&csv).len(), 2 * 5);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "[model]\nK = 1.5\nomega = \"silver\"\n[lyapunov]\nn = 500\nphases = 2\ne_min = 0\ne_max = 1\ne_step = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_qpco"))
        .args(["scan-lyapunov", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&fs::read_to_string(out.join("lyapunov.csv")).unwrap());
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == "silver" && r[2] == "1.5"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| qpco(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["scan-lyapunov", "--set", "lyapunov.nope=1"]), 2);
    assert_eq!(code(&["scan-lyapunov", "--set", "lyapunov.e_step=0"]), 2);
    assert_eq!(
        code(&[
            "reduce",
            "--set",
            "model.omega=\"liouville:45\"",
            "--set",
            "model.K=0.5"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "gordon-probe",
            "--set",
            "model.omega=\"liouville:45\"",
            "--set",
            "gordon.stages=[12]",
        ]),
        4
    );
}
