use std::path::Path;
use std::process::{Command, Output};

use qsat_core::{Hypergraph, QsatInstance};

fn qsat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsat")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn gen_then_solve_param() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsat(dir.path(), &["gen", "crash", "--t", "2", "--k", "3", "--out", "c.json", "--filtration-out", "f.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let inst: QsatInstance = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!((inst.n(), inst.m()), (8, 7));

    let out = qsat(dir.path(), &["solve", "param", "--instance", "c.json", "--filtration", "f.json", "--seed", "7", "--out", "r.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&std::fs::read(dir.path().join("r.json")).unwrap());
    assert!(report["residual"].as_f64().unwrap() <= 1e-8);
    assert!(!report["state"].is_null());

    std::fs::write(dir.path().join("s.json"), report["state"].to_string()).unwrap();
    let out = qsat(dir.path(), &["oracle", "check", "--instance", "c.json", "--state", "s.json"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out.stdout)["null_check"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = qsat(dir.path(), &["gen", "fir-tree", "--t", "2", "--k", "3", "--seed", "4"]);
    let b = qsat(dir.path(), &["gen", "fir-tree", "--t", "2", "--k", "3", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    std::fs::write(dir.path().join("i.json"), &a.stdout).unwrap();
    let strip = |o: &Output| {
        let mut v = json(&o.stdout);
        v["timings"] = serde_json::Value::Null;
        v
    };
    let r1 = qsat(dir.path(), &["solve", "param", "--instance", "i.json"]);
    let r2 = qsat(dir.path(), &["solve", "param", "--instance", "i.json"]);
    assert_eq!(code(&r1), 0, "{}", String::from_utf8_lossy(&r1.stderr));
    assert_eq!(strip(&r1), strip(&r2));
}

#[test]
fn bounded_reject_and_unsat_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = r#"{"hypergraph":{"n":3,"edges":[[1],[1],[2,3]]},
        "constraints":[{"k":1,"coeffs":[[0,0],[1,0]]},{"k":1,"coeffs":[[1,0],[0,0]]},{"k":2,"coeffs":[[1,0],[0,0],[0,0],[0,0]]}],
        "seed":null}"#;
    std::fs::write(dir.path().join("u.json"), inst).unwrap();
    let out = qsat(dir.path(), &["solve", "bounded", "--instance", "u.json"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stdout)["outcome"], "reject");
    let out = qsat(dir.path(), &["oracle", "satisfiable", "--instance", "u.json"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out.stdout)["satisfiable"], false);
}

#[test]
fn bounded_solves_pseudo_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsat(dir.path(), &["gen", "pseudo-line", "--discs", "4", "--crosses", "3", "--seed", "2", "--out", "p.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = qsat(dir.path(), &["solve", "bounded", "--instance", "p.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out.stdout)["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"n\": 3,\n \"edges\": [[1, 2,]]}").unwrap();
    let out = qsat(dir.path(), &["analyze", "--hypergraph", "bad.json"]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");

    let out = qsat(dir.path(), &["solve", "param", "--instance", "missing.json"]);
    assert_eq!(code(&out), 4);
    let out = qsat(dir.path(), &["gen", "crash", "--t", "2"]);
    assert_eq!(code(&out), 4);
    let out = qsat(dir.path(), &["gen", "crash", "-t", "2"]);
    assert_eq!(code(&out), 4, "short flags are rejected");
}

#[test]
fn analyze_filtrate_decouple() {
    let dir = tempfile::tempdir().unwrap();
    let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap();
    std::fs::write(dir.path().join("g.json"), g.to_json()).unwrap();

    let out = qsat(dir.path(), &["analyze", "--hypergraph", "g.json"]);
    assert_eq!(code(&out), 0);
    let a = json(&out.stdout);
    assert_eq!(a["m"], 4);
    assert!(a["matching"]["sdr"].is_array());

    let spec = r#"{"foundation":[1,2],"steps":[{"edge":0,"adds":3},{"edge":1,"adds":4},{"edge":2,"adds":null},{"edge":3,"adds":null}]}"#;
    std::fs::write(dir.path().join("f.json"), spec).unwrap();
    let out = qsat(dir.path(), &["filtrate", "--hypergraph", "g.json", "--filtration", "f.json"]);
    assert_eq!(code(&out), 0);
    let f = json(&out.stdout);
    assert_eq!(f["radius"], 2);
    assert_eq!(f["r_map"], serde_json::json!([0, 0, 1, 1]));

    let bad = r#"{"foundation":[1,2,3,4],"steps":[{"edge":0,"adds":null},{"edge":1,"adds":null},{"edge":2,"adds":null},{"edge":3,"adds":null}]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = qsat(dir.path(), &["filtrate", "--hypergraph", "g.json", "--filtration", "bad.json"]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out.stdout)["valid"], false);

    let out = qsat(dir.path(), &["decouple", "--hypergraph", "g.json", "--filtration", "f.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out.stdout)["p"], serde_json::json!([1, 2, 3, 4, 4, 4]));
}

#[test]
fn bench_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsat(dir.path(), &["bench", "crash", "--t", "1..3", "--k", "3", "--seeds", "5", "--out", "b.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family,t,n,m,b,radius,solver_ms,oracle_ms,residual"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 15);
    for r in &rows {
        assert_eq!(r.len(), 9);
        assert!(r[8].parse::<f64>().unwrap() <= 1e-8);
    }
    let ns: Vec<&str> = rows.iter().step_by(5).map(|r| r[2]).collect();
    assert_eq!(ns, ["4", "8", "16"]);
    assert!(rows[10][7].is_empty(), "oracle skipped above its cap");
}
