use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_plysweep");
const HEADER: &str = "name,n,m,density,layout,ply,events,postponed,dropped,time_ms";

fn fixture(name: &str) -> String {
    format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn out_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn compute_k3() {
    let v = json(&["compute", &fixture("k3.gml")]);
    assert_eq!(v["ply"], 1);
    assert_eq!(v["n"], 3);
    assert_eq!(v["m"], 3);
    assert!(v.get("agrees").is_none());
}

#[test]
fn tangent_disks_have_ply_one() {
    // D_v has radius 2 and reaches x = 6, D_w has radius 2 and starts there
    let p = tmp(
        "tangent.gml",
        "graph [ node [ id 0 graphics [ x 0 y 0 ] ] node [ id 1 graphics [ x 4 y 0 ] ]\n\
         node [ id 2 graphics [ x 8 y 0 ] ] edge [ source 0 target 1 ] edge [ source 1 target 2 ] ]",
    );
    assert_eq!(json(&["compute", p.to_str().unwrap()])["ply"], 1);
}

#[test]
fn verify_agrees_on_random_drawing() {
    let gml = out_path("random30.gml");
    ok(&["layout", "gnm:n=30,density=1.5,seed=4", "random", "--seed", "3", "--out", gml.to_str().unwrap()]);
    let v = json(&["compute", gml.to_str().unwrap(), "--verify"]);
    assert_eq!(v["agrees"], true);
    assert_eq!(v["oracle"]["ply"], v["ply"]);
}

#[test]
fn compute_csv_row() {
    let text = ok(&["compute", &fixture("k3.gml"), "--format", "csv"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "k3");
    assert_eq!(row[4], "input");
    assert_eq!(row[5], "1");
    assert_eq!(lines.next(), None);
}

#[test]
fn parse_failures_exit_2() {
    let bad = tmp("bad.gml", "graph [ node [ id 0 ");
    for args in [
        vec!["compute", bad.to_str().unwrap()],
        vec!["emptyply", bad.to_str().unwrap()],
        vec!["compute", "/definitely/not/here.gml"],
        vec!["layout", bad.to_str().unwrap(), "organic"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn structural_input_needs_a_layout_for_compute() {
    let o = run(&["compute", &fixture("star.graphml")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_algorithm_exits_2() {
    let o = run(&["layout", &fixture("star.graphml"), "spiral"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn circular_layout_of_graphml() {
    let gml = out_path("star_circ.gml");
    let stdout = ok(&["layout", &fixture("star.graphml"), "circular", "--out", gml.to_str().unwrap()]);
    let ply: usize = stdout.trim().strip_prefix("ply ").unwrap().parse().unwrap();
    let v = json(&["compute", gml.to_str().unwrap()]);
    assert_eq!(v["ply"], ply);
    let n = v["n"].as_u64().unwrap() as usize;
    assert!(ply <= n.div_ceil(2));
}

#[test]
fn random_layout_is_deterministic() {
    let a = ok(&["layout", "gnm:n=50,density=2", "random", "--seed", "7"]);
    let b = ok(&["layout", "gnm:n=50,density=2", "random", "--seed", "7"]);
    assert_eq!(a, b);
    assert!(a.starts_with("graph ["));
    let c = ok(&["layout", "gnm:n=50,density=2", "random", "--seed", "8"]);
    assert_ne!(a, c);
}

#[test]
fn minimize_dense_falls_back() {
    let cfg = tmp("refine200.json", r#"{"refine": {"iterations": 200}}"#);
    let best = out_path("dense_best.gml");
    let text = ok(&[
        "minimize",
        "gnm:n=40,density=8,seed=2",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        best.to_str().unwrap(),
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration,ply,best_ply,fallback"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert!(rows.len() > 2);
    assert!(rows.iter().all(|r| r[3] == "true"));
    let bests: Vec<usize> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(bests.windows(2).all(|w| w[1] <= w[0]));
    let final_best = *bests.last().unwrap();
    assert!(final_best <= 20);
    assert_eq!(json(&["compute", best.to_str().unwrap()])["ply"], final_best);

    let v = json(&["minimize", "gnm:n=40,density=8,seed=2", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(v["fallback"], true);
    assert_eq!(v["ply"], final_best);
}

#[test]
fn minimize_empty_graph() {
    let p = tmp("empty.gml", "graph [ ]");
    let v = json(&["minimize", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(v["ply"], 0);
    assert_eq!(v["fallback"], false);
}

#[test]
fn minimize_refines_a_given_drawing() {
    let start = out_path("path_random.gml");
    ok(&["layout", "caterpillar:n=40,seed=1", "random", "--out", start.to_str().unwrap()]);
    let before = json(&["compute", start.to_str().unwrap()])["ply"].as_u64().unwrap();
    let cfg = tmp("refine300.json", r#"{"refine": {"iterations": 300}}"#);
    let v = json(&["minimize", start.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(v["ply"].as_u64().unwrap() <= before);
}

#[test]
fn bad_config_exits_2() {
    let cfg = tmp("bad_cfg.json", r#"{"refine": {"period": 0}}"#);
    let o = run(&["minimize", "gnm:n=10", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = tmp("unknown_cfg.json", r#"{"layouts": {}}"#);
    let o = run(&["minimize", "gnm:n=10", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_single_graph_corpus() {
    let text = ok(&["bench", "--corpus", &fixture("k3.gml"), "--layouts", "organic,circular,random"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 3);
}

#[test]
fn bench_rows_reverify() {
    let text = ok(&[
        "bench",
        "--corpus",
        "gnm:n=60,density=1.5..2.5,count=3,seed=5",
        "--layouts",
        "circular,random",
        "--seed",
        "10",
    ]);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for (k, r) in rows.iter().enumerate() {
        let i = k / 2;
        let spec = format!("gnm:n=60,density={},seed={}", 1.5 + i as f64 * 0.5, 5 + i);
        let seed = (10 + i).to_string();
        let gml = out_path(&format!("bench_{k}.gml"));
        ok(&["layout", &spec, r[4], "--seed", &seed, "--out", gml.to_str().unwrap()]);
        let v = json(&["compute", gml.to_str().unwrap()]);
        assert_eq!(v["ply"].to_string(), r[5], "row {k}");
        assert_eq!(v["counters"]["events"].to_string(), r[6], "row {k}");
    }
}

#[test]
fn bench_averages_are_row_means() {
    let v = json(&[
        "bench",
        "--corpus",
        "planar:n=40..80,density=1.2..2,count=5,seed=2",
        "--layouts",
        "organic,circular",
        "--format",
        "json",
    ]);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 10);
    for avg in v["averages"].as_array().unwrap() {
        let rows: Vec<&Value> = records.iter().filter(|r| r["layout"] == avg["layout"]).collect();
        for key in ["ply", "events", "postponed", "time_ms"] {
            let mean = rows.iter().map(|r| r[key].as_f64().unwrap()).sum::<f64>() / rows.len() as f64;
            assert!((mean - avg[key].as_f64().unwrap()).abs() < 1e-9, "{key}");
        }
    }
}

#[test]
fn bench_writes_out_file() {
    let out = out_path("bench.csv");
    let stdout =
        ok(&["bench", "--corpus", "caterpillar:n=30,count=2", "--layouts", "organic", "--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn emptyply_verdicts() {
    let v = json(&["emptyply", &fixture("edge.gml")]);
    assert_eq!(v["empty"], true);
    // D_v (radius 2 at x=4) contains w at x=5 and D_w (radius 0.5)
    let p = tmp(
        "violation.gml",
        "graph [ node [ id 0 graphics [ x 0 y 0 ] ] node [ id 1 graphics [ x 4 y 0 ] ]\n\
         node [ id 2 graphics [ x 5 y 0 ] ] edge [ source 0 target 1 ] edge [ source 1 target 2 ] ]",
    );
    let v = json(&["emptyply", p.to_str().unwrap()]);
    assert_eq!(v["empty"], false);
    assert_eq!(v["violations"], serde_json::json!([[1, 2]]));
    let p = tmp("edgeless.gml", "graph [ node [ id 0 graphics [ x 0 y 0 ] ] node [ id 1 graphics [ x 0 y 0 ] ] ]");
    assert_eq!(json(&["emptyply", p.to_str().unwrap()])["empty"], true);
}
