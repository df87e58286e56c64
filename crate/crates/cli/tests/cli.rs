use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn symalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symalg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strings(v: &Value) -> Vec<Vec<String>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .collect()
}

#[test]
fn matrix_of_l12_on_degree_one() {
    let out = symalg(&["matrix", "--op", "L:1,2", "--d", "2", "--n", "1", "--gamma", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["basis"], serde_json::json!([[0, 1], [1, 0]]));
    // same matrix as [[-3/2, 1/2], [3/2, -1/2]] in the order (1,0), (0,1)
    assert_eq!(strings(&v["matrix"]), vec![vec!["-1/2", "3/2"], vec!["1/2", "-3/2"]]);
}

#[test]
fn difference_side_gives_the_same_matrix() {
    let a = json(&symalg(&["matrix", "--op", "L:1,2", "--n", "2", "--gamma", "1/2,1/3,1/5"]));
    let b = json(&symalg(&["matrix", "--op", "B12", "--n", "2", "--gamma", "1/2,1/3,1/5", "--mode", "strict"]));
    assert_eq!(a["matrix"], b["matrix"]);
}

#[test]
fn m2_is_diagonal_with_eigenvalues() {
    let out = symalg(&["matrix", "--op", "M:2", "--d", "3", "--n", "1", "--gamma", "0,0,0,0"]);
    let v = json(&out);
    assert_eq!(v["basis"], serde_json::json!([[0, 0, 1], [0, 1, 0], [1, 0, 0]]));
    let m = strings(&v["matrix"]);
    assert_eq!([&m[0][0], &m[1][1], &m[2][2]], ["-3", "-3", "0"]);
    assert!(m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x == "0")));
}

#[test]
fn unknown_operator_is_a_usage_error() {
    let out = symalg(&["matrix", "--op", "Q:1,2", "--n", "1", "--gamma", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown operator"));
    assert_eq!(symalg(&["matrix", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn invalid_gamma_exits_3() {
    let out = symalg(&["verify", "--gamma", "-1,0,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma_1"));
    assert_eq!(symalg(&["verify", "--d", "3", "--gamma", "0,0,0"]).status.code(), Some(3));
}

#[test]
fn floating_point_gamma_is_rejected() {
    assert_eq!(symalg(&["matrix", "--op", "L:1,2", "--n", "1", "--gamma", "0.5,0,0"]).status.code(), Some(2));
}

#[test]
fn verify_all_suites_passes() {
    let out = symalg(&["verify", "--d", "2", "--n", "3", "--gamma", "1/2,1/2,1/2", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let checks = v["reports"][0]["checks"].as_array().unwrap();
    assert!(checks.len() > 10);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn verify_f_relation_in_four_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = symalg(&[
        "verify", "--d", "4", "--n", "2", "--gamma", "1/2,1/3,1/4,1/5,1/7", "--suite", "f-relation", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d4_n2.json")).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn sweep_is_byte_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, workers) in [(&a, "1"), (&b, "4")] {
        let out = symalg(&[
            "sweep", "--seed", "42", "--draws", "10", "--d", "2", "--n", "2", "--suite", "spectral,racah",
            "--workers", workers, "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 11);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn sweep_records_invalid_draws() {
    let out = symalg(&["sweep", "--seed", "42", "--draws", "10", "--d", "2", "--n", "1", "--suite", "separation"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let skips = v["summary"]["skips"].as_array().unwrap();
    assert!(!skips.is_empty());
    assert!(skips.iter().all(|s| s["reason"] == "invalid-parameter skip"));
    assert_eq!(v["summary"]["skip_counts"]["invalid-parameter skip"], skips.len());
    assert_eq!(v["summary"]["checks"]["separation:eigenvalues"]["fail"], 0);
}

#[test]
fn dumps() {
    let b = json(&symalg(&["basis", "--n", "1", "--gamma", "0,0,0"]));
    assert_eq!(b["elements"].as_array().unwrap().len(), 2);
    let op = json(&symalg(&["diffop", "--op", "L:1,2", "--gamma", "0,0,0"]));
    assert_eq!(op["d"], 2);
    assert!(!op["terms"].as_array().unwrap().is_empty());
    let r = json(&symalg(&["racah", "--op", "B12", "--n", "1", "--gamma", "0,0,0"]));
    assert_eq!(r["terms"].as_array().unwrap().len(), 3);
    assert_eq!(symalg(&["diffop", "--op", "B12", "--gamma", "0,0,0"]).status.code(), Some(2));
}
