//! End-to-end tests of the `membrane` binary: exit codes, report files,
//! config precedence and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn membrane(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_membrane"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("report exists");
    serde_json::from_str(&text).expect("report is valid JSON")
}

#[test]
fn small_grid_algebra_passes_with_tight_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = membrane(
        dir.path(),
        &["verify-algebra", "--L", "2", "--n", "16", "--tol", "1e-12", "--output", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("r.json"));
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for check in checks {
        assert_eq!(check["passed"], true, "{}", check["check_name"]);
        assert!(
            check["measured_defect"].as_f64().unwrap() <= 1e-12,
            "{}: {}",
            check["check_name"],
            check["measured_defect"]
        );
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("PASS").count(), 3, "{stdout}");
}

#[test]
fn odd_point_count_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = membrane(
        dir.path(),
        &["spectrum", "--L", "6", "--n", "97", "--output", "r.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n = 97"), "stderr: {stderr}");
    assert!(stderr.contains("even"), "stderr: {stderr}");
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn forced_regional_failure_exits_one_and_writes_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    // At cut scale 0.1 the linear wells -|x| - |y| are unscreened on the
    // outer regions, so their ground values are genuinely negative and
    // the positivity check must fail (and the run must still report).
    let out = membrane(
        dir.path(),
        &["region-scan", "--L", "4", "--n", "160", "--M", "0.1", "--output", "r.json"],
    );
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("r.json"));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["passed"] == false));
    let grounds = checks[0]["artifacts"]["ground_values"].as_array().unwrap();
    assert!(
        grounds.iter().any(|g| g.as_f64().unwrap() < 0.0),
        "expected a negative regional ground value, got {grounds:?}"
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn reports_are_reproducible_modulo_timestamp_and_timings() {
    // Identical config (including the output path, which is part of the
    // config echo) in two separate directories: after masking the two
    // volatile fields the report bodies must agree byte for byte.
    let args = [
        "bracketing", "--L", "4", "--M", "1", "--schedule", "16,32,64", "--output", "r.json",
    ];
    let mut bodies = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out = membrane(dir.path(), &args);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let obj = v.as_object_mut().unwrap();
        obj.remove("timestamp").expect("timestamp present");
        obj.remove("timings").expect("timings present");
        // Re-serialize without re-ordering: field order is fixed by the
        // writer, so string equality is a byte-level comparison.
        bodies.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn flags_override_config_file_and_the_report_records_both() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "n = 32\nk = 1\n\n[spectrum]\nk = 2\n",
    )
    .unwrap();
    let out = membrane(
        dir.path(),
        &[
            "spectrum", "--config", "run.toml", "--L", "2", "--k", "3", "--output", "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("r.json"));
    let config = &report["config"];
    assert_eq!(config["points_per_axis"], 32, "file value applies");
    assert_eq!(config["modes"], 3, "flag beats file");
    assert_eq!(config["half_lengths"][0], 2.0);
    assert_eq!(config["file"], "run.toml");
    let overrides = config["overrides"].as_array().unwrap();
    assert_eq!(overrides.len(), 1);
    assert_eq!(overrides[0]["key"], "k");
    assert_eq!(overrides[0]["file_value"], "2");
    assert_eq!(overrides[0]["flag_value"], "3");
}

#[test]
fn config_file_with_mismatched_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "command = \"bracketing\"\n").unwrap();
    let out = membrane(dir.path(), &["spectrum", "--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bracketing") && stderr.contains("spectrum"), "{stderr}");
}

#[test]
fn csv_output_carries_config_comments_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = membrane(
        dir.path(),
        &[
            "spectrum", "--L", "2", "--n", "16", "--k", "2", "--format", "csv", "--output",
            "s.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.contains("# command = \"spectrum\""), "{text}");
    assert!(text.contains("# n = 16"));
    assert!(text.contains("# table: checks"));
    assert!(text.contains("check_name,measured_defect,tolerance,passed"));
    assert!(text.contains("# table: spectrum"));
    assert!(text.contains("index,eigenvalue,residual,converged"));
    // Two eigenpair rows, dot-decimal numbers, no locale separators.
    let spectrum_rows: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "index,eigenvalue,residual,converged")
        .skip(1)
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(spectrum_rows.len(), 2, "{text}");
    for row in spectrum_rows {
        assert!(row.starts_with(|c: char| c.is_ascii_digit()));
        assert!(!row.contains(';'));
    }
}

#[test]
fn zero_mode_scan_smoke_run_produces_all_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = membrane(
        dir.path(),
        &[
            "zero-mode-scan", "--L", "3,4,6", "--spacing", "0.25", "--k", "1", "--output",
            "z.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("z.json"));
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["passed"] == true));
    let rows = report["tables"]["zero_mode_rows"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // Columns: half_length, points, ground, residual, ...
    assert_eq!(rows[0][1], 24);
    assert_eq!(rows[2][1], 48);
}
