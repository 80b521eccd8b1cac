use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convex-magnitude"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn ball_exact_one() {
    let v = json(&run(&["ball-exact", "--d", "1"]));
    assert_eq!(v["num"], serde_json::json!([1, 1]));
    assert_eq!(v["den"], serde_json::json!([1]));
    assert_eq!(v["derivative_at_zero"], "1");
}

#[test]
fn ball_exact_three_at_one() {
    let v = json(&run(&["ball-exact", "--d", "3", "--eval", "1"]));
    assert_eq!(v["evaluations"][0]["value"], "25/6");
    assert_eq!(v["derivative_at_zero"], "2");
    let csv = run(&["ball-exact", "--d", "3", "--eval", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "t,value\n1,25/6\n");
}

#[test]
fn ball_exact_even_dimension_is_a_usage_error() {
    let out = run(&["ball-exact", "--d", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d must be odd"));
}

#[test]
fn ball_exact_big_integers_are_exact() {
    let out = run(&["ball-exact", "--d", "13"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 13! written out in full, not as a float.
    assert!(text.contains("\"factorial\": 6227020800"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["derivative_at_zero"], "1024/231");
}

#[test]
fn finite_mag_examples() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.txt", "0.5 0.5\n");
    let v = json(&run(&["finite-mag", "--points", &one, "--t-start", "0.1", "--t-stop", "100", "--t-count", "5", "--t-log"]));
    for s in v["samples"].as_array().unwrap() {
        assert_eq!(s["magnitude"], 1.0);
    }
    let two = write(dir.path(), "two.txt", "0\n1\n");
    let v = json(&run(&["finite-mag", "--points", &two, "--t-start", "1", "--t-stop", "1", "--t-count", "1"]));
    let m = v["samples"][0]["magnitude"].as_f64().unwrap();
    assert!((m - 1.462_117_16).abs() < 1e-8, "{m}");

    let dist = write(dir.path(), "d.csv", "0,1\n1,0\n");
    let v = json(&run(&["finite-mag", "--distances", &dist, "--t-start", "1", "--t-stop", "1", "--t-count", "1"]));
    assert_eq!(v["samples"][0]["magnitude"].as_f64().unwrap(), m);

    let dup = write(dir.path(), "dup.txt", "1 2\n1 2\n");
    let out = run(&["finite-mag", "--points", &dup]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coincide"));
}

#[test]
fn bound_check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "seg.json", r#"{"type": "interval", "length": 2}"#);
    let v = json(&run(&["bound-check", "--body", &seg, "--t-start", "1", "--t-stop", "1", "--t-count", "1"]));
    let row = &v["rows"][0];
    assert_eq!(row["upper"], 2.0);
    assert!((row["upper"].as_f64().unwrap() - row["lower"].as_f64().unwrap()) < 1e-3);

    let sq = write(dir.path(), "sq.json", r#"{"type": "box", "edges": [1, 1]}"#);
    let out = run(&["bound-check", "--body", &sq, "--cap-points", "300", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,lower,upper,conjecture_ref,flags"));
    assert_eq!(lines.clone().count(), 20);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[1].parse::<f64>().unwrap() <= f[2].parse::<f64>().unwrap(), "{line}");
        assert!(!f[4].contains("violation"));
    }

    let ball = write(dir.path(), "ball.json", r#"{"type": "ball", "dim": 2, "radius": 1.0}"#);
    let out = run(&["bound-check", "--body", &ball, "--cap-points", "50", "--t-count", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = write(dir.path(), "bad.json", r#"{"type": "box", "edges": "wide"}"#);
    assert_eq!(run(&["bound-check", "--body", &bad]).status.code(), Some(1));
}

#[test]
fn bound_check_flags_disproved_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let ball = write(dir.path(), "b5.json", r#"{"type": "ball", "dim": 5, "radius": 1}"#);
    let out = run(&["bound-check", "--body", &ball, "--cap-points", "50", "--t-start", "1", "--t-stop", "1", "--t-count", "1", "--format", "csv"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("conjecture_disproved"));
}

#[test]
fn embed_sim_examples() {
    let v = json(&run(&["embed-sim", "--d", "1", "--n", "1"]));
    let r = v["distortion"][0]["ratio"].as_f64().unwrap();
    assert!((r - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "sq.json", r#"{"type": "box", "edges": [1, 1]}"#);
    let v = json(&run(&["embed-sim", "--body", &sq, "--n", "4,16,64", "--samples", "20000"]));
    let rows = v["convergence"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["target"], 2.0);
    }
    let gap = |i: usize| (rows[i]["estimate"].as_f64().unwrap() - 2.0).abs();
    assert!(gap(2) < gap(0));

    let out = run(&["embed-sim", "--d", "5", "--n", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resource limit"));
    assert!(run(&["embed-sim", "--d", "5", "--n", "5", "--statistical", "--samples", "1000"]).status.success());
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(
        dir.path(),
        "tri.json",
        r#"{"type": "polytope", "dim": 3, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]]}"#,
    );
    let outputs: Vec<Vec<u8>> = ["a.json", "b.json"]
        .iter()
        .map(|name| {
            let path = dir.path().join(name);
            let p = path.to_str().unwrap();
            let out = run(&["bound-check", "--body", &tri, "--samples", "2000", "--cap-points", "100", "--t-count", "4", "--output", p]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let v: Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert!(v["rows"][0]["flags"].as_array().unwrap().iter().any(|f| f == "mc_inflated"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["finite-mag"]).status.code(), Some(1));
    assert_eq!(run(&["ball-exact", "--d", "3", "--t-count", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
