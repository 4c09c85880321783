use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str], input: &Value) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicereg"))
        .args(args)
        .arg("--input")
        .arg(input.to_string())
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str], input: &Value) -> Value {
    let out = run(args, input);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn quat(v: &Value) -> [f64; 4] {
    serde_json::from_value(v.clone()).unwrap()
}

fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt() <= tol
}

/// `(q - i) * (q - j) = q^2 - q(i + j) + k`.
fn qi_qj() -> Value {
    json!({"kind": "poly", "coeffs": [[0, 0, 0, 1], [0, -1, -1, 0], [1, 0, 0, 0]]})
}

#[test]
fn zeros_of_product_of_linear_factors() {
    let v = ok_json(&["zeros"], &json!({"f": qi_qj()}));
    let iso = v["isolated"].as_array().unwrap();
    assert_eq!(iso.len(), 1);
    assert!(close(quat(&iso[0]["point"]), [0.0, 1.0, 0.0, 0.0], 1e-12));
    assert!(v["spherical"].as_array().unwrap().is_empty());
}

#[test]
fn exact_zeros_agree() {
    let v = ok_json(&["zeros", "--exact"], &json!({"f": qi_qj()}));
    let ex = &v["exact"][0];
    assert_eq!(ex["x"], "0");
    assert_eq!(ex["y2"], "1");
    assert_eq!(ex["chain"][0], json!(["0", "1", "0", "0"]));
}

#[test]
fn output_is_deterministic() {
    let input = json!({"f": qi_qj()});
    let a = run(&["zeros"], &input);
    let b = run(&["zeros"], &input);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn star_of_polynomials_gives_coefficients() {
    let v = ok_json(
        &["star"],
        &json!({"f": {"kind": "poly", "coeffs": [[0, -1, 0, 0], [1, 0, 0, 0]]},
                "g": {"kind": "poly", "coeffs": [[0, 0, -1, 0], [1, 0, 0, 0]]}}),
    );
    assert_eq!(v, json!({"coeffs": [[0.0, 0.0, 0.0, 1.0], [0.0, -1.0, -1.0, 0.0], [1.0, 0.0, 0.0, 0.0]]}));
}

#[test]
fn eval_as_csv() {
    let out = run(&["eval", "--format", "csv"], &json!({"f": qi_qj(), "points": [[0, 1, 0, 0]]}));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "point.w,point.x,point.y,point.z,value.w,value.x,value.y,value.z");
    assert_eq!(lines.next().unwrap(), "0.0,1.0,0.0,0.0,0.0,0.0,0.0,0.0");
}

#[test]
fn series_output_round_trips_as_input() {
    let f = json!({"kind": "rational", "num": [[0, 1, 0, 0], [1, 0, 0, 0]], "den": [1, 0, 1]});
    let series = ok_json(&["series"], &json!({"f": f, "x0": 0.0, "y0": 1.0, "n_min": -1, "depth": 6}));
    let p = json!([0.1, 0.9, 0.2, -0.1]);
    let direct = ok_json(&["eval"], &json!({"f": f, "point": p}));
    let again = ok_json(&["eval"], &json!({"f": {"kind": "series", "series": series}, "point": p}));
    assert!(close(quat(&direct[0]["value"]), quat(&again[0]["value"]), 1e-12));
}

#[test]
fn laurent_output_deserializes() {
    let f = json!({"kind": "rational", "num": [[1, 0, 0, 0]], "den": [1, 0, 1]});
    let v = ok_json(&["laurent"], &json!({"f": f, "point": [0, 1, 0, 0], "window": [-2, 2]}));
    let s: slicereg::series::LaurentSeries = serde_json::from_value(v).unwrap();
    // 1/(q^2+1) = (q-i)^{-1} (q+i)^{-1}: residue -i/2 on the slice of i.
    assert!(s.coeffs[1].dist(&slicereg::Quaternion::new(0.0, -0.5, 0.0, 0.0)) < 1e-10);
}

#[test]
fn local_cauchy_reproduces() {
    let sq = json!({"kind": "poly", "coeffs": [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]]});
    let v = ok_json(
        &["cauchy"],
        &json!({"f": sq, "set": {"kind": "ball", "center": 0.0, "radius": 1.0}, "unit": [0, 0, 1, 0],
                "points": [[0, 0, 0.5, 0], [0.1, 0.2, 0, 0.3]]}),
    );
    for row in v.as_array().unwrap() {
        assert_eq!(row["ok"], true);
        assert!(row["residual"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn probe_outside_is_an_error() {
    let sq = json!({"kind": "poly", "coeffs": [[1, 0, 0, 0]]});
    let out = run(
        &["cauchy"],
        &json!({"f": sq, "set": {"kind": "ball", "center": 0.0, "radius": 1.0}, "points": [[2, 0, 0, 0]]}),
    );
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ProbeOutside");
}

#[test]
fn point_on_the_cut_is_refused() {
    // arc_0 through -1 + i in the z-plane, i.e. w = -1 + 3i.
    let out = run(&["eval"], &json!({"f": {"kind": "douren"}, "point": [-1, 3, 0, 0]}));
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"] == "OnCut" || err["error"] == "OnBoundary", "{err}");
}

#[test]
fn bad_input_exits_with_two() {
    let out = run(&["eval"], &json!({"f": {"kind": "nope"}}));
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_slicereg")).args(["eval", "--input", "{not json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn douren_jump_and_zero_reports() {
    let v = ok_json(&["douren", "--jump", "--zeros"], &json!({}));
    assert!(v.get("caps").is_none());
    for row in v["jump"].as_array().unwrap() {
        assert!(row["deviation"].as_f64().unwrap() < 1e-6);
    }
    let zeros = v["zeros"].as_array().unwrap();
    let find = |f: &str, c: &str| zeros.iter().find(|r| r["fixture"] == f && r["cap"] == c).unwrap()["zeros"].clone();
    assert_eq!(find("l", "C+")["kind"], "whole-cap");
    assert_eq!(find("g", "C-")["kind"], "empty");
}

#[test]
fn douren_field_dump_and_out_file() {
    let dir = std::env::temp_dir().join(format!("slicereg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("field.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_slicereg"))
        .args(["douren", "--grid", "4x3", "--format", "csv", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(text.starts_with("section,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_subset() {
    let out = Command::new(env!("CARGO_BIN_EXE_slicereg"))
        .args(["selftest", "--only", "1", "--only", "8", "--jobs", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS]  1"));
}
