use std::path::Path;
use std::process::{Command, Output};

use dpsbp::analysis::convergence::ConvergenceTable;
use dpsbp::analysis::experiments::LakeRestResult;
use dpsbp::io::{read_csv_rows, read_diagnostics_csv, read_eigen_csv, read_metadata, read_snapshot, read_spectra_csv, ProfileRow};
use serde_json::Value;
use tempfile::TempDir;

fn swe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swe"))
        .args(args)
        .env_remove("SWE_OUT_DIR")
        .output()
        .expect("spawn swe")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn error_record(o: &Output) -> Value {
    assert!(!o.status.success());
    serde_json::from_slice(&o.stderr).expect("machine-readable error record")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn registry_lists_every_experiment() {
    let o = swe(&["list-experiments"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for want in [
        "mms1d", "mms2d", "lake_at_rest", "lake_perturbed", "dam_break", "merging_vortex", "barotropic_jet",
        "eigenspectrum", "operator_report", "convergence",
    ] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn empty_config_lists_missing_fields() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", "{}");
    let o = swe(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_record(&o);
    assert_eq!(e["kind"], "ConfigInvalid");
    let missing: Vec<&str> = e["missing"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect();
    assert_eq!(missing, ["experiment", "operator", "grid.n"]);
}

#[test]
fn unknown_and_inapplicable_keys_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "a.json", r#"{"experiment": "mms1d", "grid": {"n": 41, "cells": 3}}"#);
    let e = error_record(&swe(&["validate", "--config", &cfg]));
    assert!(e["message"].as_str().unwrap().contains("cells"));

    let cfg = write(tmp.path(), "b.json", r#"{"experiment": "lake_at_rest", "operator": {"family": "dp", "order": 6}, "grid": {"n": 51}, "physics": {"g": 1.0}}"#);
    let e = error_record(&swe(&["validate", "--config", &cfg]));
    assert!(e["message"].as_str().unwrap().contains("physics.g is not configurable"));

    let e = error_record(&swe(&["validate", "--experiment", "mms1d", "--operator", "dp9", "--n", "41"]));
    assert!(e["message"].as_str().unwrap().contains("not shipped"));
}

#[test]
fn supercritical_linear_means_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"experiment": "eigenspectrum", "operator": {"family": "dp", "order": 4}, "grid": {"n": 40},
            "bc": "mass_flux", "physics": {"g": 1.0, "H": 1.0, "U": 1.0}}"#,
    );
    let o = swe(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(error_record(&o)["message"].as_str().unwrap().contains("subcritical"));
    // just below critical is fine
    let cfg = cfg.replace("c.json", "d.json");
    std::fs::write(&cfg, std::fs::read_to_string(tmp.path().join("c.json")).unwrap().replace("\"U\": 1.0", "\"U\": 0.9")).unwrap();
    assert!(swe(&["validate", "--config", &cfg]).status.success());
}

#[test]
fn dam_break_defaults_are_echoed() {
    let o = swe(&["validate", "--experiment", "dam_break", "--operator", "dp6", "--n", "1000"]);
    assert!(o.status.success());
    let r = &stdout_json(&o)["resolved"];
    assert_eq!(r["delta"], 0.1);
    assert_eq!(r["cfl"], 0.15);
    assert_eq!(r["n_steps"], 1000);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"experiment": "lake_at_rest", "operator": {"family": "drp", "order": 4}, "grid": {"n": 51}, "time": {"cfl": 0.2}}"#,
    );
    let v = stdout_json(&swe(&["validate", "--config", &cfg, "--n", "64", "--operator", "dp6"]));
    let r = &v["resolved"];
    assert_eq!(r["n"], 64);
    assert_eq!(r["family"], "DP");
    assert_eq!(r["order"], 6);
    assert_eq!(r["cfl"], 0.2);
}

#[test]
fn output_root_falls_back_to_env() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_swe"))
        .args(["run", "--experiment", "operator_report", "--operator", "dp4"])
        .env("SWE_OUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_metadata(&tmp.path().join("operator_report/metadata.json")).unwrap();
    assert_eq!(meta.summary["all_pass"], true);
    assert_eq!(meta.summary["pairs"], 2);
}

#[test]
fn lake_at_rest_run_stays_at_rest() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("lake");
    let o = swe(&["run", "--experiment", "lake_at_rest", "--operator", "dp6", "--n", "201", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let series: Vec<LakeRestResult> = read_csv_rows(&out.join("diagnostics.csv")).unwrap();
    let last = series.last().unwrap();
    assert_eq!(last.t, 5.0);
    assert!(last.max_u <= 1e-12, "{}", last.max_u);
    let profile: Vec<ProfileRow> = read_csv_rows(&out.join("profile.csv")).unwrap();
    assert_eq!(profile.len(), 201);
    let (header, fields) = read_snapshot(&out.join("state.bin")).unwrap();
    assert_eq!(header.fields, ["h", "u", "b"]);
    for (row, (h, u)) in profile.iter().zip(fields[0].iter().zip(&fields[1])) {
        assert_eq!((row.h, row.u), (*h, *u));
    }
    let meta = read_metadata(&out.join("metadata.json")).unwrap();
    assert_eq!(meta.experiment, "lake_at_rest");
    assert_eq!(meta.operator, "dp6");
    for f in &meta.files {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn eigenspectrum_run_is_stable() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("eig");
    let o = swe(&[
        "run", "--experiment", "eigenspectrum", "--operator", "dp6", "--n", "501", "--bc", "mass_flux", "--delta", "0",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let eig = read_eigen_csv(&out.join("eigenvalues.csv")).unwrap();
    assert_eq!(eig.len(), 2 * 502);
    let norm = read_metadata(&out.join("metadata.json")).unwrap().summary["norm"].as_f64().unwrap();
    let max_re = eig.iter().map(|e| e.0).fold(f64::MIN, f64::max);
    assert!(max_re <= 1e-8 * norm, "{max_re:e}");
}

#[test]
fn convergence_suite_reproduces_dp4_rates() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("conv");
    let o = swe(&["run", "--experiment", "convergence", "--suite", "table1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // (label, q_u, q_h) at N = 641
    for (label, qu, qh) in [("dp4_linear", 4.01, 4.01), ("dp4_nonlinear", 3.97, 4.02)] {
        let f = std::fs::File::open(out.join(format!("convergence_{label}.csv"))).unwrap();
        let t = ConvergenceTable::read_csv(f).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.m).collect::<Vec<_>>(), [41, 81, 161, 321, 641]);
        let last = t.last().unwrap();
        assert!((last.q_u.unwrap() - qu).abs() <= 0.35, "{label} q_u {:?}", last.q_u);
        assert!((last.q_h.unwrap() - qh).abs() <= 0.35, "{label} q_h {:?}", last.q_h);
    }
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let tmp = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = swe(&["run", "--experiment", "merging_vortex", "--operator", "dp4", "--n", "32", "--t-end", "0.05", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["state.bin", "diagnostics.csv", "spectra.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let series = read_diagnostics_csv(&a.join("diagnostics.csv")).unwrap();
    assert_eq!(series.first().unwrap().t, 0.0);
    assert!((series.last().unwrap().t - 0.05).abs() < 1e-12);
    let (header, fields) = read_snapshot(&a.join("state.json")).unwrap();
    assert_eq!(header.shape, [32, 32]);
    assert_eq!(fields.len(), 4);
    let sp = read_spectra_csv(&a.join("spectra.csv")).unwrap();
    assert!(!sp.shell.is_empty());
}

#[test]
fn numerical_failure_emits_an_error_record() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("bad");
    // far beyond the stability limit
    let o = swe(&[
        "run", "--experiment", "dam_break", "--operator", "dp4", "--n", "100", "--cfl", "5", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let e = error_record(&o);
    assert_eq!(e["kind"], "NumericalFailure");
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(out.join("error.json")).unwrap()).unwrap();
    assert_eq!(on_disk, e);
}

#[test]
fn mms1d_run_writes_a_convergence_table() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("mms");
    let cfg = write(
        tmp.path(),
        "c.json",
        &format!(
            r#"{{"experiment": "mms1d", "operator": {{"family": "dp", "order": 4}}, "grid": {{"sizes": [41, 81]}},
                "nonlinear": false, "physics": {{"U": 1.0, "H": 10.0}}, "output_dir": "{}"}}"#,
            out.display()
        ),
    );
    let o = swe(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = ConvergenceTable::read_csv(std::fs::File::open(out.join("convergence.csv")).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
    let meta = read_metadata(&out.join("metadata.json")).unwrap();
    assert_eq!(meta.config["run"]["flux"]["Linear"]["u_mean"], 1.0);
    assert_eq!(meta.summary["q_h"], t.rows[1].q_h.unwrap());
}
