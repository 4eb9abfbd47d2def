//! End-to-end tests of the `mrab` binary: golden coefficient values, exit
//! code discipline, artifact determinism, and round-trips through the same
//! parsers the library ships.

use std::path::Path;
use std::process::{Command, Output};

use mrab::output::CsvTable;

fn mrab_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrab"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn run_ok(args: &[&str]) -> (String, String) {
    let out = mrab_bin(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn exit_code(args: &[&str]) -> i32 {
    mrab_bin(args).status.code().expect("no signal")
}

/// Pull the least-squares slope out of an `eoc` summary line.
fn summary_slope(stderr: &str) -> f64 {
    let line = stderr
        .lines()
        .find(|l| l.starts_with("eoc:"))
        .unwrap_or_else(|| panic!("no eoc summary in: {stderr}"));
    let tail = line.split("slope ").nth(1).expect("slope field");
    tail.split_whitespace()
        .next()
        .expect("slope value")
        .parse()
        .expect("slope parses")
}

#[test]
fn coeffs_matches_classical_ab3() {
    let (stdout, _) = run_ok(&["coeffs", "--nodes", "-2,-1,0", "--order", "3", "--interval", "0,1"]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    assert_eq!(table.header, vec!["node", "alpha"]);
    let want = [
        (-2.0, 5.0 / 12.0),
        (-1.0, -16.0 / 12.0),
        (0.0, 23.0 / 12.0),
    ];
    assert_eq!(table.rows.len(), want.len());
    for (row, (node, alpha)) in table.rows.iter().zip(want) {
        assert_eq!(row[0], node);
        assert!(
            (row[1] - alpha).abs() <= 1e-12 * alpha.abs(),
            "alpha {} vs {alpha}",
            row[1]
        );
    }
}

#[test]
fn coeffs_extended_history_uses_the_minimum_norm_weights() {
    let (stdout, _) = run_ok(&[
        "coeffs",
        "--nodes",
        "-3,-2,-1,0",
        "--order",
        "3",
        "--interval",
        "0,1",
    ]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    let want = [43.0 / 120.0, -79.0 / 120.0, -31.0 / 120.0, 187.0 / 120.0];
    assert_eq!(table.rows.len(), want.len());
    for (row, alpha) in table.rows.iter().zip(want) {
        assert!(
            (row[1] - alpha).abs() <= 1e-12 * alpha.abs(),
            "alpha {} vs {alpha}",
            row[1]
        );
    }
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let region = |p: &Path| {
        run_ok(&[
            "stability-region",
            "--scheme",
            "ab",
            "--order",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
    };
    region(&csv_a);
    region(&csv_b);
    let bytes_a = std::fs::read(&csv_a).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, std::fs::read(&csv_b).unwrap());

    let json_a = dir.path().join("a.json");
    let json_b = dir.path().join("b.json");
    let maxdt = |p: &Path| {
        run_ok(&["max-dt", "--out", p.to_str().unwrap()]);
    };
    maxdt(&json_a);
    maxdt(&json_b);
    let bytes_a = std::fs::read(&json_a).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, std::fs::read(&json_b).unwrap());
}

#[test]
fn stability_region_csv_round_trips_through_the_parser() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("region.csv");
    let (stdout, _) = run_ok(&[
        "stability-region",
        "--scheme",
        "rk4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        stdout.contains(path.to_str().unwrap()),
        "summary names the artifact: {stdout}"
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let table = CsvTable::parse(&text).expect("artifact is valid CSV");
    assert_eq!(table.header, vec!["theta", "r", "re", "im"]);
    assert_eq!(table.rows.len(), 500);
    // Parsing and re-rendering reproduces the file bit for bit.
    assert_eq!(table.render(), text);
    // The pi ray sits at index 250 and carries the negative real extent.
    let pi_row = &table.rows[250];
    assert!((pi_row[0] - std::f64::consts::PI).abs() < 1e-12);
    assert!((pi_row[1] - 3.085294).abs() < 1e-5, "r(pi) = {}", pi_row[1]);
}

#[test]
fn max_dt_json_parses_and_lands_in_the_rk4_window() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("maxdt.json");
    run_ok(&["max-dt", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).expect("artifact is valid JSON");
    let dt_max = v["dt_max"].as_f64().expect("dt_max present");
    let rho = v["rho_at_dt_max"].as_f64().expect("rho present");
    assert!(dt_max > 0.03 && dt_max < 0.035, "dt_max = {dt_max}");
    assert!(rho <= 1.0 + 1e-9 || rho < 1.001, "rho = {rho}");
    assert!(v["iterations"].as_u64().expect("iterations") > 0);
}

#[test]
fn exit_codes_separate_usage_from_numerical_failures() {
    // Success and help paths exit 0.
    assert_eq!(exit_code(&["--help"]), 0);
    assert_eq!(exit_code(&["--version"]), 0);
    assert_eq!(exit_code(&["stability-region", "--help"]), 0);

    // Bad invocations exit 1.
    assert_eq!(exit_code(&["bogus"]), 1);
    assert_eq!(exit_code(&["coeffs", "--nodes", "-2,-1,0", "--order", "3"]), 1);
    assert_eq!(
        exit_code(&["coeffs", "--nodes", "0,0,1", "--order", "3", "--interval", "0,1"]),
        1,
        "duplicate nodes are a usage error"
    );
    assert_eq!(
        exit_code(&["advect", "--dt", "0.001", "--cfl", "0.4"]),
        1,
        "dt and cfl are mutually exclusive"
    );
    assert_eq!(
        exit_code(&["integrate", "--scheme", "mrab", "--problem", "decay"]),
        1,
        "mrab needs the partitioned problem"
    );
    assert_eq!(
        exit_code(&["integrate", "--scheme", "ab", "--order", "4", "--steps", "2"]),
        1,
        "too few steps to clear the bootstrap"
    );
    assert_eq!(
        exit_code(&["stability-region", "--scheme", "mrab"]),
        1,
        "locus is defined for single-rate schemes"
    );

    // A sound invocation whose computation fails exits 2.
    assert_eq!(
        exit_code(&["max-dt", "--bracket", "0.0001,0.0002"]),
        2,
        "bracket does not straddle the boundary"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n": 41, "bogus": 1}"#).unwrap();
    let out = mrab_bin(&["advect", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bogus"), "error names the key: {stderr}");
}

#[test]
fn config_file_fields_merge_under_flags() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("advect.json");
    std::fs::write(&cfg, r#"{"n": 41, "steps": 10, "scheme": "rk3"}"#).unwrap();
    let (stdout, stderr) = run_ok(&[
        "advect",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "21",
    ]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    assert_eq!(table.rows.len(), 21, "flag overrides the file's n");
    assert!(stderr.contains("rk3"), "file scheme survives: {stderr}");
}

#[test]
fn eoc_slope_matches_the_decay_benchmark() {
    let (_, stderr) = run_ok(&[
        "eoc",
        "--scheme",
        "ab",
        "--order",
        "3",
        "--dts",
        "0.05,0.025,0.0125",
    ]);
    let slope = summary_slope(&stderr);
    assert!((slope - 3.0).abs() <= 0.2, "slope = {slope}");
}

#[test]
fn eoc_multirate_slope_on_the_coupled_problem() {
    let (_, stderr) = run_ok(&[
        "eoc",
        "--scheme",
        "mrab-ext",
        "--order",
        "3",
        "--sr",
        "4",
        "--problem",
        "coupled-linear",
        "--dts",
        "0.08,0.04,0.02,0.01",
    ]);
    let slope = summary_slope(&stderr);
    assert!((slope - 3.0).abs() <= 0.15, "slope = {slope}");
}

#[test]
fn eoc_flags_roundoff_limited_refinements() {
    // AB3 integrates a quadratic RHS exactly, so every refinement sits at
    // round-off and the fit is declared meaningless.
    let (stdout, stderr) = run_ok(&[
        "eoc",
        "--scheme",
        "ab",
        "--order",
        "3",
        "--problem",
        "poly2",
        "--dts",
        "0.1,0.05,0.025",
    ]);
    assert!(stderr.contains("round-off"), "warning emitted: {stderr}");
    assert!(stderr.contains("slope NaN"), "slope is NaN: {stderr}");
    let table = CsvTable::parse(&stdout).expect("errors still tabulated");
    assert!(table.rows.iter().all(|r| r[1] < 1e-12));
}

#[test]
fn perf_model_case_reproduces_the_large_mesh_count() {
    let dir = tempfile::tempdir().expect("tempdir");
    let case = dir.path().join("large.json");
    std::fs::write(
        &case,
        r#"{
            "grids": [
                {"points": 12582912, "rate": "fast"},
                {"points": 339521, "rate": "slow"},
                {"points": 11419614, "rate": "slow"},
                {"points": 2060250, "rate": "slow"}
            ],
            "sr_list": [1, 2, 3, 4, 5],
            "order": 3
        }"#,
    )
    .unwrap();
    let (stdout, _) = run_ok(&["perf-model", "--case", case.to_str().unwrap()]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    assert_eq!(
        table.header,
        vec!["sr", "r_rk4", "n_rhs_rk4", "n_rhs_ab", "speedup", "pct_reduction"]
    );
    assert_eq!(table.rows.len(), 5);
    for row in &table.rows {
        assert_eq!(row[2], 105_609_188.0, "RK4 reference count is exact");
    }
    let sr5 = table.rows.iter().find(|r| r[0] == 5.0).expect("sr 5 row");
    assert!(
        (sr5[3] - 59_299_803.0).abs() <= 0.005 * 59_299_803.0,
        "N_ab at sr 5 = {}",
        sr5[3]
    );
}

#[test]
fn integrate_header_tracks_the_problem_dimension() {
    let (stdout, _) = run_ok(&[
        "integrate",
        "--scheme",
        "rk4",
        "--problem",
        "coupled-linear",
        "--dt",
        "0.1",
        "--steps",
        "5",
    ]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    assert_eq!(table.header, vec!["t", "y0", "y1"]);
    assert_eq!(table.rows.len(), 6, "initial row plus five steps");

    let (stdout, _) = run_ok(&[
        "integrate",
        "--scheme",
        "mrab",
        "--sr",
        "3",
        "--problem",
        "coupled-linear",
        "--dt",
        "0.05",
        "--steps",
        "8",
    ]);
    let table = CsvTable::parse(&stdout).expect("artifact is valid CSV");
    assert_eq!(table.header, vec!["t", "f", "s"]);
    // Initial row, bootstrap landing, then one row per remaining macro step.
    assert_eq!(table.rows.len(), 8);
    let macro_h = 0.05 * 3.0;
    let last = table.rows.last().unwrap();
    assert!((last[0] - 8.0 * macro_h).abs() < 1e-12);
}
