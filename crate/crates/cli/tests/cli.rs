use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussbalance"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Rows of the CSV section named `table` in `text`, header first.
fn section(text: &str, table: &str) -> Vec<Vec<String>> {
    let tag = format!("table={table}");
    let mut lines = text
        .lines()
        .skip_while(|l| !(l.starts_with("#schema=") && l.ends_with(&tag)));
    lines.next().unwrap_or_else(|| panic!("no section {table}"));
    lines
        .take_while(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = rows[0].iter().position(|c| c == name).expect("column");
    rows[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn bounds_row_at_one_half() {
    let out = run(&["bounds-table", "--p", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("#schema=gaussbalance/1,"));
    let rows = section(&text, "bounds");
    assert_eq!(rows.len(), 2);
    let f: f64 = column(&rows, "f")[0].parse().unwrap();
    assert!((f - 0.74130).abs() < 5e-6, "{f}");
}

#[test]
fn cone_sweep_stays_below_half_p() {
    let out = run(&["verify-cone", "--p", "0.25", "--grid", "200"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = section(&text, "cone_sweep");
    let excess: f64 = column(&rows, "max_excess")[0].parse().unwrap();
    assert!(excess < 0.0);
    assert_eq!(column(&rows, "points")[0], "200");
    assert_eq!(section(&text, "cone_profile").len(), 201);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn full_run_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(&["all", "--seed", "42", "--out", a.path().to_str().unwrap()]);
    let second = run(&["all", "--seed", "42", "--out", b.path().to_str().unwrap()]);
    assert_eq!(first.status.code(), second.status.code());
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert!(fa.len() > 10);
    assert_eq!(fa, fb);
}

#[test]
fn json_report_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"p": [0.25], "format": "json", "seed": 3, "tolerances": {"balance_certificate": 1e-6}}"#,
    )
    .unwrap();
    let out = run(&["counterexample", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "gaussbalance/1");
    assert_eq!(doc["passed"], true);
    let rows = doc["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // 17 significant digits in the raw text
    let raw = String::from_utf8(out.stdout).unwrap();
    assert!(raw.contains("0.25000000000000000"));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(
        run(&["bounds-table", "--tol", "nonsense=1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bounds-table", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["all", "--grid", "10"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify-cone", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn threads_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_gaussbalance"))
        .args(["verify-balancing", "--grid", "3"])
        .env("GAUSSBALANCE_THREADS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
