use std::path::Path;
use std::process::{Command, Output};

fn sectorial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sectorial")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn alpha_one_is_a_config_error() {
    let o = sectorial(&["verify", "--alpha", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha > 1"), "{err}");
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(sectorial(&["classify-grid", "--slice", "re=3"]).status.code(), Some(2));
    assert_eq!(sectorial(&["classify-grid", "--band-tol", "-1"]).status.code(), Some(2));
    assert_eq!(sectorial(&["classify-grid", "--grid", "0"]).status.code(), Some(2));
    assert_eq!(sectorial(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"grid": 3, "epsilon": 0.2}"#).unwrap();
    let o = sectorial(&["classify-grid", "--config", cfg.to_str().unwrap(), "--grid", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 4);
    // extent 3 * epsilon 0.2
    assert!(text.lines().nth(1).unwrap().starts_with("-6.00000e-1,"), "{text}");

    std::fs::write(&cfg, r#"{"gird": 3}"#).unwrap();
    let o = sectorial(&["classify-grid", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn one_by_one_grid_is_a_single_row() {
    let o = sectorial(&["classify-grid", "--grid", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "coord1,coord2,label,re_z0_plus_c,re_z0_minus_c");
    assert_eq!(lines[1].split(',').count(), 5);
}

#[test]
fn decompose_builtins() {
    let o = sectorial(&["decompose", "--surface", "p1-minus-4pts"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"], serde_json::json!({"pieces": 3, "hypersurfaces": 2, "corners": 0}));
    let c = &v["decomposition"]["completions"];
    assert_eq!(c["U(m-,m-)"]["model"], "(C*)^2");
    assert_eq!(c["U(m-,m+)"]["model"], "P x C*");
    assert_eq!(c["U(m+,m+)"]["model"], "C x C*");
    assert!(v["mirror"].as_str().unwrap().contains("xyz=0"));

    let o = sectorial(&["decompose", "--surface", "example-5.3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"], serde_json::json!({"pieces": 6, "hypersurfaces": 6, "corners": 1}));
    assert!(v.get("mirror").is_none());
    assert_eq!(v["lg_labels"], serde_json::json!({}));
}

#[test]
fn decompose_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"components\": [").unwrap();
    let o = sectorial(&["decompose", "--surface", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let invalid = dir.path().join("invalid.json");
    std::fs::write(&invalid, r#"{"components": [{"id": "m", "genus": 0, "ends": 1, "slots": ["x"]}]}"#).unwrap();
    let o = sectorial(&["decompose", "--surface", invalid.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("slot x of m is not on any arc"), "{err}");

    assert_eq!(sectorial(&["decompose", "--surface", "no-such-surface"]).status.code(), Some(2));
}

#[test]
fn decompose_writes_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested");
    let o = sectorial(&["decompose", "--surface", "example-5.3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out.join("decomposition.json")).unwrap();
    assert!(text.contains("\"corners\""));
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn grid_outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = d.path().to_str().unwrap();
        for cmd in ["classify-grid", "slice-plot"] {
            let o = sectorial(&[cmd, "--grid", "41", "--slice", "im=0.3", "--out", out]);
            assert_eq!(o.status.code(), Some(0));
        }
    }
    assert_eq!(read(a.path(), "classify_grid.csv"), read(b.path(), "classify_grid.csv"));
    assert_eq!(read(a.path(), "slice_plot.svg"), read(b.path(), "slice_plot.svg"));
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = sectorial(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&read(dir.path(), "verify_report.json")).unwrap();
    assert_eq!(v["passed"], true);
    let c_bounds = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "c_bounds").unwrap();
    assert!(c_bounds["worst"].as_f64().unwrap() < 1e-6);
}
