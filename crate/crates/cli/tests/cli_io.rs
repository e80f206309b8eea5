//! End-to-end checks of the binary: exit codes, round-trips, determinism,
//! and the CSV/JSON field identity of sweep reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_divsmooth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("divsmooth-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn clip_example_document() {
    let out = run(&[
        "clip",
        "--p",
        "0.6,0.3,0.1",
        "--q",
        "uniform",
        "--eps",
        "0.1",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema"], "divsmooth/1");
    let clipped: Vec<f64> = doc["clipped"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((clipped[0] - 0.5).abs() < 1e-12);
    assert!((clipped[1] - 0.3).abs() < 1e-12);
    assert!((clipped[2] - 0.2).abs() < 1e-12);
    assert_eq!(doc["k"], 1);
    assert_eq!(doc["m"], 2);
}

#[test]
fn bound_examples_and_infinite_branch() {
    let out = run(&[
        "bound", "mu", "--eps", "0.125", "--alpha", "2", "--beta", "inf",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(doc["branch"], "beta_gt_alpha_gt_1");

    // infinite values keep exit code 0 and serialize as the string "inf"
    let out = run(&[
        "bound", "mu", "--eps", "0.3", "--alpha", "0.5", "--beta", "2",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["value"], "inf");
    assert_eq!(doc["branch"], "otherwise");
}

#[test]
fn exit_codes_by_error_class() {
    // domain error: out-of-regime correction query
    let out = run(&[
        "bound", "mu-sub", "--eps", "0.3", "--alpha", "0.5", "--beta", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["error"].as_str().unwrap().contains("regime"));

    // parse error: malformed vector literal
    let out = run(&[
        "divergence",
        "--p",
        "0.6,zebra",
        "--q",
        "uniform",
        "--order",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // unknown flags are parse errors
    let out = run(&["clip", "--p", "0.5,0.5", "--eps", "0.1", "--bogus", "7"]);
    assert_eq!(out.status.code(), Some(1));

    // IO error: unreadable input file
    let out = run(&[
        "clip",
        "--input",
        "/definitely/not/here.json",
        "--eps",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn emitted_documents_round_trip() {
    let dir = tmp_dir("roundtrip");
    let doc_path = dir.join("clip.json");
    let out = run(&[
        "clip",
        "--p",
        "0.62,0.27,0.11",
        "--q",
        "0.2,0.35,0.45",
        "--eps",
        "0.17",
        "--output",
        doc_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let first = std::fs::read_to_string(&doc_path).unwrap();

    // feeding the emitted document back reproduces it byte for byte
    let out = run(&["clip", "--input", doc_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), first);

    let out2 = run(&[
        "smooth",
        "--input",
        doc_path.to_str().unwrap(),
        "--order",
        "2",
    ]);
    assert!(out2.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out2)).unwrap();
    assert!(doc["value"].as_f64().is_some());
}

#[test]
fn log_base_conversion() {
    let bits = run(&[
        "divergence",
        "--p",
        "0.75,0.25",
        "--q",
        "uniform",
        "--order",
        "2",
    ]);
    let nats = run(&[
        "divergence",
        "--p",
        "0.75,0.25",
        "--q",
        "uniform",
        "--order",
        "2",
        "--log-base",
        "e",
    ]);
    let b: serde_json::Value = serde_json::from_str(&stdout(&bits)).unwrap();
    let n: serde_json::Value = serde_json::from_str(&stdout(&nats)).unwrap();
    let vb = b["value"].as_f64().unwrap();
    let vn = n["value"].as_f64().unwrap();
    assert!((vb * core::f64::consts::LN_2 - vn).abs() < 1e-12);
    assert_eq!(b["units"], "bits");
    assert_eq!(n["units"], "nats");
}

#[test]
fn csv_format_of_scalar_documents() {
    let out = run(&[
        "bound", "kappa", "--eps", "0.5", "--alpha", "0.5", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let row = lines.next().unwrap();
    assert!(header.contains("value"));
    assert!(row.contains("2.00000000000e0"));
}

#[test]
fn sweep_outputs_are_deterministic_and_field_identical() {
    let dir_a = tmp_dir("sweep-a");
    let dir_b = tmp_dir("sweep-b");
    let cfg_path = dir_a.join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{"seed": 99, "instances": 120, "dims": [2, 3, 4, 100], "eps_grid": [0.1, 0.3]}"#,
    )
    .unwrap();
    // identical seeds must give identical bytes regardless of parallelism
    for (dir, threads) in [(&dir_a, "3"), (&dir_b, "1")] {
        let out = bin()
            .args([
                "sweep",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out-dir",
                dir.to_str().unwrap(),
            ])
            .env("DIVSMOOTH_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let csv_a = std::fs::read(dir_a.join("report.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.join("report.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "report.csv differs between identical runs");
    let json_a = std::fs::read(dir_a.join("summary.json")).unwrap();
    let json_b = std::fs::read(dir_b.join("summary.json")).unwrap();
    assert_eq!(
        json_a, json_b,
        "summary.json differs between identical runs"
    );

    // CSV records and JSON records carry identical numeric fields
    let summary: serde_json::Value = serde_json::from_slice(&json_a).unwrap();
    let records = summary["records"].as_array().unwrap();
    let csv_text = String::from_utf8(csv_a).unwrap();
    let csv_records: Vec<&str> = csv_text
        .lines()
        .filter(|l| l.starts_with("record,"))
        .collect();
    assert_eq!(records.len(), csv_records.len());
    for (json_rec, csv_line) in records.iter().zip(&csv_records) {
        let cols: Vec<&str> = csv_line.split(',').collect();
        // kind,check,d,eps,alpha,beta,lhs,rhs,margin,bound,gap
        assert_eq!(json_rec["check"].as_str().unwrap(), cols[1]);
        assert_eq!(json_rec["d"].as_i64().unwrap().to_string(), cols[2]);
        for (field, col) in [("eps", 3), ("lhs", 6), ("rhs", 7), ("margin", 8)] {
            let jv = json_rec[field].as_f64().unwrap();
            let cv: f64 = cols[col].parse().unwrap();
            assert_eq!(jv, cv, "field {field} mismatch");
        }
    }
    assert!(summary["max_violation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn verify_subcommand_reports_all_green() {
    let out = run(&["verify", "--seed", "7", "--instances", "60"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["all_pass"], true, "{doc}");
}

#[test]
fn family_subcommand_constructions() {
    let out = run(&[
        "family", "nu-h", "--d", "5", "--eps", "0.25", "--alpha", "0.5",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let v: Vec<f64> = doc["vector"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(v, vec![0.5, 0.125, 0.125, 0.125, 0.125]);

    // infeasible family parameters are domain errors (exit 2)
    let out = run(&[
        "family",
        "kyfan-max",
        "--d",
        "4",
        "--eps",
        "0.3",
        "--t",
        "0.5",
        "--s",
        "0.9",
        "--ell",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
