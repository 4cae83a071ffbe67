//! Black-box tests of the command line binary: exit codes, report schemas,
//! custom space files, and byte-identical reruns.

use std::process::{Command, Output};

fn weakprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn gap_csv_schema_and_determinism() {
    let args = [
        "gap", "--space", "da2", "--n", "1..2", "--trunc", "5", "--format", "csv",
    ];
    let out = weakprod(&args);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,N,row_norm,col_norm,ratio,expected_ratio,certificate_ok"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for (row, n) in rows.iter().zip([1u32, 2]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], n.to_string());
        assert_eq!(fields[1], "5");
        let expected: f64 = fields[5].parse().unwrap();
        assert!((expected - ((n + 1) as f64).sqrt()).abs() < 1e-12);
        assert_eq!(fields[6], "true");
    }

    let rerun = weakprod(&args);
    assert_eq!(rerun.stdout, text.as_bytes());
}

#[test]
fn wp_json_report() {
    let out = weakprod(&[
        "wp", "--h", "(1+z)^2", "--deg", "1", "--rank", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["config"]["command"], "wp");
    let cell = &parsed["cells"][0];
    assert_eq!(cell["D"], 1);
    assert_eq!(cell["r"], 1);
    let outcome = &cell["outcome"];
    assert!((outcome["upper"].as_f64().unwrap() - 2.0).abs() < 1e-7);
    assert!((outcome["h1_oracle"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!(outcome["lower"].as_f64().unwrap() <= 2.0 + 1e-7);
}

#[test]
fn dump_matrix_exports_shift() {
    let out = weakprod(&["dump-matrix", "--h", "z", "--trunc", "2"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &parsed["cells"][0]["outcome"];
    assert_eq!(m["rows"], 4);
    assert_eq!(m["cols"], 3);
    assert_eq!(m["entries"].as_array().unwrap().len(), 12);
}

#[test]
fn custom_space_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("space.json");
    std::fs::write(
        &path,
        r#"{"family":"custom","d":1,"coeffs":[1.0,1.0,10.0]}"#,
    )
    .unwrap();
    let spec = format!("custom:{}", path.display());
    let out = weakprod(&["cnp", "--space", &spec, "--trunc", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("false"), "coefficient test should reject: {row}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(weakprod(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        weakprod(&["gap", "--space", "bergman"]).status.code(),
        Some(1)
    );
    assert_eq!(weakprod(&["wp"]).status.code(), Some(1), "wp requires --h");
    assert_eq!(
        weakprod(&["gap", "--space", "da2", "--n", "x..y"]).status.code(),
        Some(1)
    );
}

#[test]
fn numerical_failure_exits_2() {
    // degree budget 0 cannot factor z^2: the cell fails, the grid completes
    let out = weakprod(&["wp", "--h", "z^2", "--deg", "0", "--rank", "1"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["cells"][0]["outcome"]["error"].is_string());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = weakprod(&[
        "cnp", "--space", "dirichlet", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(out.stdout.is_empty());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed["cells"][0]["outcome"]["pass"], true);
}
