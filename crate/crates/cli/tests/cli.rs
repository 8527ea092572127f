//! End-to-end behaviour of the `hessgeom` binary: listings, exit codes,
//! report output and tensor evaluation.

use std::process::{Command, Output};

fn hessgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessgeom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_presets_and_suites() {
    let o = hessgeom(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines, ["orthant2", "orthant3", "lorentz3", "spd2", "sk_flat", "sk_cubic", "sk_conic"]);

    let o = hessgeom(&["list", "--suites"]);
    assert_eq!(stdout(&o).lines().count(), 7);

    let o = hessgeom(&["list", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["presets"].as_array().unwrap().len(), 7);
    let o = hessgeom(&["list", "--suites", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suites"][6], "all");
}

#[test]
fn cone_suite_passes() {
    let o = hessgeom(&["check", "orthant2", "--suite", "cone"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn counterexample_fails_with_domega_reported() {
    let o = hessgeom(&["check", "noncone_counterexample", "--suite", "rmap", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    let domega = entries.iter().find(|e| e["check_id"] == "rmap.domega").unwrap();
    assert_eq!(domega["pass"], false);
    assert!((domega["residual"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn usage_errors_exit_2() {
    let o = hessgeom(&["check", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    assert_eq!(hessgeom(&["check", "orthant2", "--suite", "cmap"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["check", "orthant2", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["check", "orthant2", "--tol", "nope"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["check", "orthant2", "--tol", "cone.nope=1"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["eval", "orthant2", "gcan", "--at", "-1,1"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["eval", "orthant2", "I1", "--at", "1,1"]).status.code(), Some(2));
    assert_eq!(hessgeom(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name": "bad", "dim": 2, "potential": "x1^", "box": [[1, 2], [1, 2]]}"#).unwrap();
    let o = hessgeom(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(hessgeom(&["check", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tolerance_override_changes_the_verdict() {
    let args = ["check", "noncone_counterexample", "--suite", "rmap", "--samples", "10"];
    assert_eq!(hessgeom(&args).status.code(), Some(1));
    let mut relaxed = args.to_vec();
    relaxed.extend(["--tol", "rmap.domega=2"]);
    let o = hessgeom(&relaxed);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("< 2e0"));
}

#[test]
fn reports_are_byte_identical_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = hessgeom(&["check", "sk_conic", "--samples", "20", "--fd-check", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["geometry"], "sk_conic");
    assert_eq!(v["seed"], 42);
    let ids: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["check_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(ids.iter().any(|id| id.ends_with(".fd_agreement")));
}

#[test]
fn eval_prints_matrices() {
    let o = hessgeom(&["eval", "orthant2", "gcan", "--at", "1,1"]);
    assert_eq!(stdout(&o), "1  0\n0  1\n");
    let o = hessgeom(&["eval", "orthant2", "gcon", "--at", "1,1"]);
    assert_eq!(stdout(&o), "2  1\n1  2\n");
    let o = hessgeom(&["eval", "orthant2", "gcan", "--at", "3,1", "--json"]);
    let v: Vec<Vec<f64>> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v[0][0] - 1.0 / 9.0).abs() < 1e-15);
    let o = hessgeom(&["eval", "orthant2", "gcan", "--at", "3,1"]);
    assert!(stdout(&o).starts_with("0.111111111111"));

    let o = hessgeom(&["eval", "sk_flat", "I2", "--at", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let o2 = hessgeom(&["eval", "sk_flat", "I2", "--at", "0.2,-0.4,0.7,0.1"]);
    assert_eq!(stdout(&o), stdout(&o2));

    let o = hessgeom(&["eval", "orthant2", "gr", "--at", "1,1"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn exported_configs_reload_and_pass() {
    let dir = tempfile::tempdir().unwrap();
    for (name, suite) in [("lorentz3", "selfsimilar"), ("sk_conic", "conformal")] {
        let path = dir.path().join(format!("{name}.json"));
        let o = hessgeom(&["export", name, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let o = hessgeom(&["check", path.to_str().unwrap(), "--suite", suite, "--samples", "10"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}
