//! End-to-end tests of the `slicegap` binary: output formats, worked
//! examples, error paths, and byte-exact determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_slicegap")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn slicegap")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn tmp(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("slicegap-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    fs::create_dir_all(&p).unwrap();
    p
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

/// Rows of a CSV file, split into fields, header dropped.
fn csv_rows(path: &PathBuf) -> Vec<Vec<String>> {
    let raw = fs::read_to_string(path).unwrap();
    raw.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sample_is_deterministic_and_well_formed() {
    let a = tmp("sample-a");
    let b = tmp("sample-b");
    for dir in [&a, &b] {
        let out = run(&[
            "sample", "--target", "gaussian", "--dim", "2", "--n", "1000", "--seed", "7",
            "--x0", "1,0", "--out", dir.to_str().unwrap(),
        ]);
        assert_code(&out, 0);
    }
    let fa = fs::read(a.join("gaussian-2d-chain.csv")).unwrap();
    let fb = fs::read(b.join("gaussian-2d-chain.csv")).unwrap();
    assert_eq!(fa, fb, "reruns are not byte-identical");

    let text = String::from_utf8(fa).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,x_1,x_2,rho_x,t"));
    assert_eq!(lines.count(), 1000);
}

#[test]
fn sample_stays_inside_support() {
    let dir = tmp("sample-support");
    let out = run(&[
        "sample", "--target", "bimodal", "--dim", "2", "--n", "100", "--seed", "1",
        "--x0", "0,0", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    for row in csv_rows(&dir.join("bimodal-2d-chain.csv")) {
        let rho: f64 = row[3].parse().unwrap();
        assert!(rho > 0.0, "row {row:?} has rho <= 0");
    }
}

#[test]
fn sample_exponential_matches_stationary_mean() {
    let dir = tmp("sample-mean");
    let out = run(&[
        "sample", "--target", "exponential", "--dim", "1", "--alpha", "1", "--n", "100000",
        "--seed", "3", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let rows = csv_rows(&dir.join("exponential-1d-chain.csv"));
    let mean: f64 = rows
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap().abs())
        .sum::<f64>()
        / rows.len() as f64;
    assert!(
        (mean - 1.0).abs() < 0.02,
        "mean |x| = {mean}, expected 1.00 +- 0.02"
    );
}

#[test]
fn sample_rejects_unknown_target_and_bad_x0() {
    let dir = tmp("sample-bad");
    let out = run(&[
        "sample", "--target", "cauchy", "--dim", "2", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 2);
    let out = run(&[
        "sample", "--target", "gaussian", "--dim", "2", "--x0", "1,2,3",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 2);
}

#[test]
fn levelchain_levels_stay_in_range() {
    let dir = tmp("levelchain");
    let out = run(&[
        "levelchain", "--target", "exponential", "--dim", "2", "--n", "1000", "--seed", "11",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let rows = csv_rows(&dir.join("exponential-2d-levels.csv"));
    assert_eq!(rows.len(), 1000);
    for row in rows {
        let t: f64 = row[1].parse().unwrap();
        assert!(t > 0.0 && t < 1.0, "level {t} outside (0, 1)");
    }
}

#[test]
fn couple_reports_equality_case() {
    let dir = tmp("couple-eq");
    let out = run(&[
        "couple", "--target", "exponential", "--dim", "3", "--x0", "2,0,0", "--y0", "0.5,0,0",
        "--reps", "100000", "--seed", "5", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    let ub = v["ub"].as_f64().unwrap();
    let lb = v["lb"].as_f64().unwrap();
    assert!((ub - 1.125).abs() < 0.02, "ub = {ub}");
    assert!((lb - 1.125).abs() < 0.02, "lb = {lb}");
    assert!(dir.join("exponential-3d-wasserstein.json").is_file());
    let steps = csv_rows(&dir.join("exponential-3d-couple.csv"));
    assert_eq!(steps.len(), 13, "12 steps plus the initial pair");
}

#[test]
fn couple_identical_endpoints_give_all_zero_report() {
    let dir = tmp("couple-zero");
    let out = run(&[
        "couple", "--target", "exponential", "--dim", "3", "--x0", "1,0,0", "--y0", "1,0,0",
        "--reps", "1000", "--seed", "5", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    for field in ["ub", "ub_se", "lb", "lb_se"] {
        assert_eq!(v[field].as_f64().unwrap(), 0.0, "{field} nonzero");
    }
}

#[test]
fn couple_rejects_non_monotone_targets() {
    let dir = tmp("couple-reject");
    for target in ["volcano", "bimodal"] {
        let out = run(&[
            "couple", "--target", target, "--dim", "2", "--out", dir.to_str().unwrap(),
        ]);
        assert_code(&out, 2);
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("couple supports"), "stderr: {err}");
    }
}

#[test]
fn classify_reports_minimal_class() {
    let dir = tmp("classify");
    let out = run(&[
        "classify", "--target", "volcano", "--dim", "3", "--kmax", "6",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    assert_eq!(v["k_min"].as_u64(), Some(1));
    assert_eq!(v["member"].as_bool(), Some(true));

    let out = run(&[
        "classify", "--target", "gaussian", "--dim", "4", "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    assert_eq!(v["k_min"].as_u64(), Some(2));

    let out = run(&[
        "classify", "--target", "gaussian", "--dim", "4", "--k", "1",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    assert_eq!(v["member"].as_bool(), Some(false));
    assert_eq!(v["k"].as_u64(), Some(1));
}

#[test]
fn gap_bimodal_is_satisfied() {
    let dir = tmp("gap");
    let out = run(&[
        "gap", "--target", "bimodal", "--dim", "2", "--grid", "512",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let v = stdout_json(&out);
    assert_eq!(v["satisfied"].as_bool(), Some(true));
    assert_eq!(v["lower_bound"].as_f64(), Some(0.5));
    assert!(v["gap"].as_f64().unwrap() >= 0.48);
    assert!(v["refinement_delta"].as_f64().unwrap() < 0.005);
    assert!(dir.join("bimodal-2d-gap.json").is_file());
}

#[test]
fn gap_rejects_out_of_range_grids() {
    let dir = tmp("gap-range");
    for grid in ["8", "4096"] {
        let out = run(&[
            "gap", "--target", "gaussian", "--dim", "2", "--grid", grid,
            "--out", dir.to_str().unwrap(),
        ]);
        assert_code(&out, 2);
    }
}

#[test]
fn bounds_match_worked_examples() {
    let out = run(&["bounds", "mixing", "--dim", "9", "--eps", "0.01", "--w0", "1"]);
    assert_code(&out, 0);
    assert_eq!(stdout_json(&out)["iterations"].as_u64(), Some(47));

    let out = run(&["bounds", "tv", "--gap", "0.5", "--n", "8", "--chi", "1"]);
    assert_code(&out, 0);
    assert_eq!(stdout_json(&out)["bound"].as_f64(), Some(0.00390625));

    let out = run(&["bounds", "mixing", "--dim", "9", "--eps", "2", "--w0", "1"]);
    assert_code(&out, 2);
}

#[test]
fn suite_rejects_unknown_names_and_empty_manifests() {
    let dir = tmp("suite-bad");
    let out = run(&["suite", "no-such-suite", "--out", dir.to_str().unwrap()]);
    assert_code(&out, 2);

    let empty = dir.join("empty.json");
    fs::write(&empty, "{}").unwrap();
    let out = run(&["suite", empty.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_code(&out, 2);

    let blank = dir.join("blank.json");
    fs::write(&blank, "").unwrap();
    let out = run(&["suite", blank.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_code(&out, 2);
}

#[test]
fn suite_genexp_table_passes_and_reruns_identically() {
    let a = tmp("suite-genexp-a");
    let b = tmp("suite-genexp-b");
    for dir in [&a, &b] {
        let out = run(&["suite", "genexp-table", "--out", dir.to_str().unwrap()]);
        assert_code(&out, 0);
        assert!(String::from_utf8_lossy(&out.stdout).contains("3/3 checks passed"));
    }
    for file in ["summary.csv", "membership.csv"] {
        let fa = fs::read(a.join("genexp-table").join(file)).unwrap();
        let fb = fs::read(b.join("genexp-table").join(file)).unwrap();
        assert_eq!(fa, fb, "{file} differs across reruns");
    }
}

#[test]
fn suite_manifest_file_overrides_knobs() {
    let dir = tmp("suite-manifest");
    let manifest = dir.join("gap.json");
    fs::write(
        &manifest,
        r#"{ "suite": "bimodal-gap", "seed": 9, "grid": 128 }"#,
    )
    .unwrap();
    let out = run(&["suite", manifest.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.join("bimodal-gap").join("gap-bimodal-2d.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["n"].as_u64(), Some(128));
    assert_eq!(report["satisfied"].as_bool(), Some(true));
}

#[test]
fn suite_level_invariance_passes() {
    let dir = tmp("suite-inv");
    let out = run(&["suite", "level-invariance", "--out", dir.to_str().unwrap()]);
    assert_code(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2/2 checks passed"), "stdout: {stdout}");
}
