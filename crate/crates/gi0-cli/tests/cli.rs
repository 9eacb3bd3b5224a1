//! End-to-end tests of the `gi0` binary: spawn it, check stdout/stderr
//! and exit codes against the documented contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gi0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gi0"))
        .args(args)
        .output()
        .expect("the binary spawns")
}

/// Run expecting success; returns stdout.
fn stdout_of(args: &[&str]) -> String {
    let out = gi0(args);
    assert!(
        out.status.success(),
        "gi0 {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

/// Run expecting failure; returns (exit code, stderr).
fn failure_of(args: &[&str]) -> (i32, String) {
    let out = gi0(args);
    assert!(!out.status.success(), "gi0 {args:?} unexpectedly succeeded");
    (
        out.status.code().expect("no exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Value of the first `key=...` line in a key=value stdout dump.
fn value_of<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|line| line.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key}= line in:\n{stdout}"))
}

/// Simulate a two-texture strip into `dir` and return the raster path.
fn simulate(dir: &Path, name: &str, spec: &[(&str, &str)]) -> PathBuf {
    let path = dir.join(name);
    let mut args = vec!["simulate-strip".to_owned()];
    for (flag, value) in spec {
        args.push(format!("--{flag}"));
        args.push((*value).to_owned());
    }
    args.push("--out".to_owned());
    args.push(path.to_str().expect("UTF-8 temp path").to_owned());
    let borrowed: Vec<&str> = args.iter().map(String::as_str).collect();
    stdout_of(&borrowed);
    path
}

#[test]
fn gd_alpha_prints_the_pinned_value() {
    // |ln(−8 / −2)| = ln 4 at one look
    let out = stdout_of(&["distance", "gd-alpha", "--alpha1", "-8", "--alpha2", "-2", "--looks", "1"]);
    assert_eq!(out, "gd=1.386294\n");
}

#[test]
fn gd_gamma_prints_the_closed_form_value() {
    // √(2·1/(2+1+1))·ln(10/5) = √0.5·ln 2
    let out = stdout_of(&["distance", "gd-gamma", "--gamma1", "5", "--gamma2", "10", "--alpha", "-2", "--looks", "1"]);
    assert_eq!(out, "gd=0.490129\n");
}

#[test]
fn td_reports_value_and_convergence() {
    let out = stdout_of(&["distance", "td", "--alpha1", "-2", "--gamma1", "1", "--alpha2", "-5", "--gamma2", "4", "--looks", "1"]);
    let value: f64 = value_of(&out, "td").parse().expect("td is numeric");
    assert!(value > 0.0 && value < 2.0, "td={value}");
    assert_eq!(value_of(&out, "converged"), "true");
}

#[test]
fn unknown_flags_fail_with_usage_text() {
    let (code, stderr) = failure_of(&["distance", "gd-alpha", "--bogus"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("Usage"), "stderr:\n{stderr}");
}

#[test]
fn domain_failures_exit_one_with_a_coded_line() {
    let (code, stderr) =
        failure_of(&["distance", "gd-alpha", "--alpha1", "2", "--alpha2", "-2", "--looks", "1"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error: domain-error: "), "stderr:\n{stderr}");
}

#[test]
fn missing_input_reports_a_stable_code() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("absent.raw");
    let (code, stderr) = failure_of(&["estimate", "--in", path.to_str().unwrap(), "--looks", "1"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error: missing-sidecar: "), "stderr:\n{stderr}");
}

#[test]
fn estimate_recovers_the_simulated_law() {
    let dir = tempfile::tempdir().expect("tempdir");
    // both halves identical, so the whole raster is one law
    let strip = simulate(
        dir.path(),
        "flat.raw",
        &[
            ("rows", "20"), ("cols", "1000"),
            ("alpha1", "-4"), ("gamma1", "3"),
            ("alpha2", "-4"), ("gamma2", "3"),
            ("looks", "2"), ("seed", "11"),
        ],
    );
    let strip = strip.to_str().unwrap();

    let fit = stdout_of(&["estimate", "--in", strip, "--looks", "2"]);
    assert_eq!(value_of(&fit, "n"), "20000");
    assert_eq!(value_of(&fit, "converged"), "true");
    let alpha: f64 = value_of(&fit, "alpha_hat").parse().unwrap();
    let gamma: f64 = value_of(&fit, "gamma_hat").parse().unwrap();
    assert!((-4.6..=-3.5).contains(&alpha), "alpha_hat={alpha}");
    assert!((2.5..=3.6).contains(&gamma), "gamma_hat={gamma}");

    // left half only, with the scale pinned at its true value
    let fixed = stdout_of(&[
        "estimate", "--in", strip, "--region", "0,0,500,20", "--looks", "2", "--fix-gamma", "3",
    ]);
    assert_eq!(value_of(&fixed, "n"), "10000");
    assert_eq!(value_of(&fixed, "gamma_hat"), "3.000000");

    let (code, stderr) =
        failure_of(&["estimate", "--in", strip, "--region", "900,0,200,10", "--looks", "2"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error: invalid-region: "), "stderr:\n{stderr}");
}

#[test]
fn enl_of_a_nearly_textureless_region_tracks_the_looks() {
    let dir = tempfile::tempdir().expect("tempdir");
    // α = −50 is close to the textureless limit, so the moment estimate
    // lands near the true 4 looks (biased slightly low by residual texture)
    let strip = simulate(
        dir.path(),
        "smooth.raw",
        &[
            ("rows", "20"), ("cols", "1000"),
            ("alpha1", "-50"), ("gamma1", "49"),
            ("alpha2", "-50"), ("gamma2", "49"),
            ("looks", "4"), ("seed", "13"),
        ],
    );
    let out = stdout_of(&["enl", "--in", strip.to_str().unwrap(), "--region", "0,0,1000,20"]);
    assert_eq!(value_of(&out, "n"), "20000");
    let enl: f64 = value_of(&out, "enl").parse().unwrap();
    assert!((2.5..=4.5).contains(&enl), "enl={enl}");
}

#[test]
fn detect_edge_reports_the_transition_block_and_writes_a_trace() {
    let dir = tempfile::tempdir().expect("tempdir");
    let strip = simulate(
        dir.path(),
        "edge.raw",
        &[
            ("rows", "10"), ("cols", "2000"),
            ("alpha1", "-2"), ("gamma1", "1"),
            ("alpha2", "-8"), ("gamma2", "7"),
            ("looks", "1"), ("seed", "7"),
        ],
    );
    let out_csv = dir.path().join("trace.csv");
    let text = stdout_of(&[
        "detect-edge",
        "--in", strip.to_str().unwrap(),
        "--noe", "500",
        "--looks", "1",
        "--out", out_csv.to_str().unwrap(),
    ]);
    // transition at column 1000 = block 2 of 500-column blocks
    assert_eq!(value_of(&text, "p_hat_gd"), "2");

    let csv = fs::read_to_string(&out_csv).expect("trace CSV was written");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# format=1"));
    assert_eq!(
        lines.next(),
        Some("k,split_col,m1,n1,alpha1_star,alpha2_star,s_gd,stat_gd,s_td,stat_td")
    );
    // k_top = 2000/500 − 1 candidate splits
    assert_eq!(lines.count(), 3);
}

#[test]
fn banded_detection_prints_one_line_per_band() {
    let dir = tempfile::tempdir().expect("tempdir");
    let strip = simulate(
        dir.path(),
        "bands.raw",
        &[
            ("rows", "7"), ("cols", "1200"),
            ("alpha1", "-2"), ("gamma1", "1"),
            ("alpha2", "-8"), ("gamma2", "7"),
            ("looks", "1"), ("seed", "21"),
        ],
    );
    let out_csv = dir.path().join("bands.csv");
    let text = stdout_of(&[
        "detect-edge",
        "--in", strip.to_str().unwrap(),
        "--noe", "300",
        "--looks", "1",
        "--band-height", "3",
        "--out", out_csv.to_str().unwrap(),
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["band=0 p_hat_gd=2", "band=1 p_hat_gd=2"]);

    let csv = fs::read_to_string(&out_csv).expect("bands CSV was written");
    assert!(csv.contains("# band=0"));
    assert!(csv.contains("# band=1"));
    // row 6 does not fill a third 3-row band
    assert!(csv.contains("# dropped_rows=6..7"), "csv:\n{csv}");
}

#[test]
fn two_sample_distance_attaches_statistic_and_p_value() {
    let dir = tempfile::tempdir().expect("tempdir");
    let common = [
        ("rows", "5"), ("cols", "1200"),
        ("alpha1", "-2"), ("gamma1", "1"),
        ("alpha2", "-2"), ("gamma2", "1"),
        ("looks", "1"),
    ];
    let mut spec1 = common.to_vec();
    spec1.push(("seed", "1"));
    let mut spec2 = common.to_vec();
    spec2.push(("seed", "2"));
    let s1 = simulate(dir.path(), "same1.raw", &spec1);
    let s2 = simulate(dir.path(), "same2.raw", &spec2);

    for kind in ["gd", "td"] {
        let out = stdout_of(&[
            "distance", "samples",
            "--in1", s1.to_str().unwrap(),
            "--in2", s2.to_str().unwrap(),
            "--looks", "1",
            "--kind", kind,
        ]);
        assert_eq!(value_of(&out, "kind"), kind);
        assert_eq!(value_of(&out, "m"), "6000");
        assert_eq!(value_of(&out, "n"), "6000");
        assert_eq!(value_of(&out, "converged"), "true");
        let statistic: f64 = value_of(&out, "statistic").parse().unwrap();
        let p_value: f64 = value_of(&out, "p_value").parse().unwrap();
        assert!(statistic >= 0.0, "statistic={statistic}");
        assert!((0.0..=1.0).contains(&p_value), "p_value={p_value}");
    }
}

#[test]
fn seeded_monte_carlo_runs_are_bit_identical() {
    let args = [
        "mc", "edge-curves",
        "--reps", "2", "--rows", "4", "--cols", "1500", "--noe", "300", "--seed", "9",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    assert!(first.starts_with("# format=1\nk,alpha2,looks,kind,mean_stat\n"));
}

#[test]
fn pvalue_study_emits_one_rate_row_per_size_and_kind() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_csv = dir.path().join("rates.csv");
    let args = ["mc", "pvalues", "--reps", "4", "--sizes", "300,600", "--seed", "5"];
    let text = stdout_of(&args);

    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# format=1");
    assert_eq!(lines[1], "size,kind,rejection_rate,stderr");
    assert_eq!(lines.len(), 2 + 4, "one gd and one td row per size");
    for line in &lines[2..] {
        let rate: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&rate), "line: {line}");
    }

    // --out writes exactly what stdout would have carried
    let mut file_args = args.to_vec();
    file_args.extend(["--out", out_csv.to_str().unwrap()]);
    let silent = stdout_of(&file_args);
    assert!(silent.is_empty());
    assert_eq!(fs::read_to_string(&out_csv).unwrap(), text);
}

#[test]
fn figure_bundle_covers_all_four_curve_families() {
    let text = stdout_of(&["figures"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# format=1");
    assert_eq!(lines[1], "x,looks,curve_id,gd");
    // texture sweeps: 49- and 11-point grids across 5 looks;
    // scale sweeps: 37- and 77-point grids across 2 looks
    assert_eq!(lines.len(), 2 + 49 * 5 + 11 * 5 + 37 * 2 + 77 * 2);
    for id in ["texture_wide", "texture_narrow", "scale_five", "scale_ten"] {
        assert!(text.contains(id), "missing curve id {id}");
    }
    // --reps and --seed are accepted for interface uniformity only
    assert_eq!(stdout_of(&["figures", "--reps", "3", "--seed", "9"]), text);
}
