use std::fs;
use std::process::Command;

use abflux_cli::config::{parse_config, parse_config_json, Format, Output};
use abflux_cli::run::{run, smatrix, Artifact, SmatrixRow};
use abflux_cli::SCHEMA;

const BOUND_PAIR: &str = "alpha = 0.5\n\
    c11 = [-1.0, 0.0]\nc12 = [0.0, 0.0]\nc21 = [0.0, 0.0]\nc22 = [-1.0, 0.0]\n\
    d11 = [1.0, 0.0]\nd12 = [0.0, 0.0]\nd21 = [0.0, 0.0]\nd22 = [1.0, 0.0]\n";

const GENERIC: &str = "alpha = 0.3\n\
    u11 = [0.6, 0.0]\nu12 = [0.0, 0.8]\nu21 = [0.0, 0.8]\nu22 = [0.6, 0.0]\n\
    kappa_count = 7\nx_count = 9\n";

#[test]
fn spectrum_of_the_scalar_pair() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(BOUND_PAIR).unwrap();
    cfg.outputs = vec![Output::Spectrum];
    let report = run(&cfg, dir.path()).unwrap();
    assert!(report.passed());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z,multiplicity,proximity_warning");
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert!((fields[0].parse::<f64>().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(fields[1], "2");
}

#[test]
fn smatrix_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(GENERIC).unwrap();
    cfg.outputs = vec![Output::Smatrix];
    run(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("smatrix.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kappa,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im,unitarity_defect"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 7);
    assert!((rows[0][0] - 1e-3).abs() < 1e-18 && (rows[6][0] - 1e3).abs() < 1e-12);
    for row in &rows {
        assert_eq!(row.len(), 10);
        assert!(row[9] <= 1e-12);
    }
    // 17 significant digits reproduce the doubles exactly.
    let exact = smatrix(&cfg).unwrap();
    for (row, e) in rows.iter().zip(&exact) {
        assert_eq!(row[1], e.s.0[0][0].re);
        assert_eq!(row[8], e.s.0[1][1].im);
    }
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(GENERIC).unwrap();
    cfg.outputs = vec![Output::Smatrix, Output::Classify, Output::Wavesymbol];
    cfg.format = Format::Json;
    run(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("smatrix.json")).unwrap();
    let artifact: Artifact<Vec<SmatrixRow>> = serde_json::from_str(&text).unwrap();
    assert_eq!(artifact.schema, SCHEMA);
    let echoed = parse_config_json(&serde_json::to_string(&artifact.config).unwrap()).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(artifact.data, smatrix(&echoed).unwrap());

    let classify: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("classify.json")).unwrap()).unwrap();
    assert_eq!(classify["data"]["infinity"]["case"], "ii");
    assert_eq!(classify["data"]["zero"]["case"], "b");
    assert!(classify["data"]["energy_independent"].is_null());
    let symbols: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("wavesymbol.json")).unwrap()).unwrap();
    assert_eq!(symbols["data"].as_array().unwrap().len(), 9);
}

#[test]
fn classify_is_json_even_for_csv_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(BOUND_PAIR).unwrap();
    cfg.outputs = vec![Output::Classify];
    let report = run(&cfg, dir.path()).unwrap();
    assert_eq!(report.files, vec![dir.path().join("classify.json")]);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, GENERIC).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_abflux"))
        .args(["smatrix", "--config", good.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--threads", "2"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("smatrix.csv").exists());

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, GENERIC.replace("alpha = 0.3", "alpha = 1.0")).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_abflux"))
        .args(["classify", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 1: alpha"), "{stderr}");
}

#[test]
fn verify_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(GENERIC).unwrap();
    cfg.outputs = vec![Output::Verify];
    let report = run(&cfg, dir.path()).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    let names: Vec<&str> = v["data"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v["data"][0]["target"].is_array());
}
