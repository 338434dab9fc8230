use std::process::{Command, Output};

use serde_json::Value;

fn esspath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esspath"))
        .args(args)
        .env_remove("ESSPATH_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = esspath(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn dims_e6_pretty() {
    let out = esspath(&["dims", "--graph", "E6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(6,10,14,18,20,20,20,18,14,10,6)"), "{text}");
    assert!(text.contains("total:  156"), "{text}");
}

#[test]
fn dims_methods_agree() {
    let k = json(&["dims", "--graph", "D5", "--method", "kernel", "--format", "json"]);
    let r = json(&["dims", "--graph", "D5", "--method", "recursive", "--format", "json"]);
    assert_eq!(k["dims"], r["dims"]);
    assert_eq!(k["method"], "kernel");
    assert_eq!(r["method"], "recursive");
}

#[test]
fn exit_codes() {
    assert_eq!(esspath(&["basis", "--graph", "E6", "--from", "9"]).status.code(), Some(2));
    assert_eq!(
        esspath(&["basis", "--graph", "E6", "--from", "9", "--to", "0", "--length", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(esspath(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(esspath(&["dims", "--graph", "X9"]).status.code(), Some(2));
    assert_eq!(esspath(&["dims", "--graph", "A3", "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(esspath(&["verify", "--graph", "A2", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_a2_passes() {
    let out = esspath(&["verify", "--graph", "A2", "--suite", "all", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.len() > 40);
    assert!(reports.iter().all(|r| r["pass"] == true));
}

#[test]
fn json_is_deterministic_and_independent_of_jobs() {
    let args = ["verify", "--graph", "A3", "--suite", "bialgebra", "--format", "json", "--samples", "20"];
    let a = esspath(&args).stdout;
    let b = esspath(&args).stdout;
    assert_eq!(a, b);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "1"]);
    assert_eq!(a, esspath(&with_jobs).stdout);
    with_jobs.pop();
    with_jobs.push("3");
    assert_eq!(a, esspath(&with_jobs).stdout);
}

#[test]
fn a2_compare_tables() {
    let v = json(&["a2-compare", "--format", "json"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    assert!(v["tables"].is_object());
    let pretty = String::from_utf8(esspath(&["a2-compare"]).stdout).unwrap();
    assert!(pretty.contains("Δρ11 = ρ11 ⊗ ρ11 + ρrr ⊗ ρll"), "{pretty}");
}

#[test]
fn basis_e6_length_two() {
    let v = json(&["basis", "--graph", "E6", "--from", "2", "--to", "2", "--length", "2", "--format", "json"]);
    assert_eq!(v["dim"], 2);
    let coords = v["coords"].as_array().unwrap();
    for row in coords {
        let n: f64 = row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap().powi(2)).sum();
        assert!((n - 1.0).abs() < 1e-10);
    }
}

#[test]
fn product_and_decompose() {
    let v = json(&["product", "--graph", "A3", "--left", "1,2", "--right", "2,3", "--format", "json"]);
    assert_eq!(v["result"]["terms"][0]["path"], serde_json::json!(["1", "2", "3"]));
    let c = json(&["product", "--graph", "A3", "--left", "1,2", "--right", "2,1", "--op", "concat", "--format", "json"]);
    assert_eq!(c["result"]["terms"][0]["coeff"], 1.0);
    let d = json(&[
        "decompose", "--graph", "E6", "--from", "0", "--to", "3", "--length", "3", "--split", "1", "--format", "json",
    ]);
    assert!(d["reconstruction_residual"].as_f64().unwrap() < 1e-8);
    assert!((d["norm_squared"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn pf_and_fused() {
    let v = json(&["pf", "--graph", "A2", "--format", "json"]);
    assert_eq!(v["kappa"], 3);
    assert_eq!(v["beta"], 1.0);
    let f = json(&["fused", "--graph", "E6", "--format", "json"]);
    assert_eq!(f["sums"], serde_json::json!([6, 10, 14, 18, 20, 20, 20, 18, 14, 10, 6]));
    let csv = String::from_utf8(esspath(&["pf", "--graph", "A3", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("vertex,mu\n1,1\n"), "{csv}");
}

#[test]
fn graph_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a3.json");
    std::fs::write(
        &path,
        r#"{"name": "chain", "vertices": ["x", "y", "z"], "edges": [["x", "y"], ["y", "z"]], "distinguished": "x"}"#,
    )
    .unwrap();
    let v = json(&["dims", "--graph", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(v["dims"], serde_json::json!([3, 4, 3]));

    let cyc = dir.path().join("cycle.json");
    std::fs::write(
        &cyc,
        r#"{"name": "triangle", "vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"], ["c", "a"]]}"#,
    )
    .unwrap();
    let p = cyc.to_str().unwrap();
    assert_eq!(esspath(&["pf", "--graph", p]).status.code(), Some(2));
    // spectral radius 2: length must be capped explicitly
    assert_eq!(esspath(&["dims", "--graph", p, "--allow-cycles"]).status.code(), Some(2));
    let v = json(&["dims", "--graph", p, "--allow-cycles", "--max-length", "3", "--format", "json"]);
    assert_eq!(v["truncated"], true);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_esspath"))
            .args(["basis", "--graph", "D5", "--from", "0", "--to", "0", "--length", "2", "--format", "json"])
            .env("ESSPATH_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(String::from_utf8_lossy(&first.stderr).contains("written to cache"));
    let second = run();
    assert!(String::from_utf8_lossy(&second.stderr).contains("read from cache"));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
