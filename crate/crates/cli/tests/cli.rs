use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinzeta"))
        .env("KLEINZETA_CACHE", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timings(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c["elapsed_ms"] = Value::from(0);
    }
    v
}

#[test]
fn count_emits_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("counts.jsonl");
    let o = run(&cache, &["count", "--p", "3", "--k", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "40");
    let line: Value = serde_json::from_str(std::fs::read_to_string(&cache).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(line["count"], 40);
    assert_eq!(line["algorithm"], "quad-fiber");
    assert_eq!((line["p"].as_u64(), line["k"].as_u64()), (Some(3), Some(1)));

    let o = run(&cache, &["count", "--p", "3", "--k", "1", "--json"]);
    let rec: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rec["cached"], true);
    assert_eq!(rec["count"], 40);

    let fast: Value = serde_json::from_str(&stdout(&run(&cache, &["count", "--p", "2", "--k", "2", "--json"]))).unwrap();
    let naive: Value = serde_json::from_str(&stdout(&run(
        &cache,
        &["count", "--p", "2", "--k", "2", "--algorithm", "naive", "--json"],
    )))
    .unwrap();
    assert_eq!((fast["q"].as_u64(), fast["algorithm"].as_str()), (Some(4), Some("direct")));
    assert_eq!(fast["count"], naive["count"]);
}

#[test]
fn no_cache_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("counts.jsonl");
    let o = run(&cache, &["--no-cache", "count", "--p", "5", "--algorithm", "direct"]);
    assert_eq!(stdout(&o).trim(), "156");
    assert!(!cache.exists());
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    for args in [
        &["count", "--p", "9"][..],
        &["--threads", "0", "count", "--p", "3"],
        &["count", "--p", "3", "--algorithm", "magic"],
        &["theta-support", "--p", "2"],
        &["theta-support", "--type", "V"],
        &["frobnicate"],
    ] {
        assert_eq!(run(&cache, args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn trace_sweep_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&dir.path().join("c.jsonl"), &["trace-sweep", "--max", "13", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["trace p=2", "trace p=3", "trace p=5", "trace p=7", "trace p=13"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["skipped"], serde_json::json!([11]));
}

#[test]
fn hecke_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hecke.csv");
    let o = run(
        &dir.path().join("c.jsonl"),
        &["hecke-table", "--max", "30", "--out", out.to_str().unwrap()],
    );
    assert!(o.status.success());
    let mut rd = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["p", "split_type", "a", "b", "ap_f", "ap_g", "chi_dlog"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    let p23 = rows.iter().find(|r| &r[0] == "23").unwrap();
    assert_eq!(&p23[1], "split");
    let (a, b): (i64, i64) = (p23[2].parse().unwrap(), p23[3].parse().unwrap());
    assert_eq!(a * a + 11 * b * b, 4 * 23);
    assert_eq!(rows.iter().find(|r| &r[0] == "11").unwrap()[1].to_string(), "ramified");
}

#[test]
fn cohomology_summary_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&dir.path().join("c.jsonl"), &["cohomology"]);
    assert!(o.status.success());
    let s: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(s["h3_dim"], 10);
    assert_eq!(s["fil2_rank"], 5);
    assert_eq!(s["alpha_order"], 5);
}

#[test]
fn theta_support_small_prime() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &dir.path().join("c.jsonl"),
        &["theta-support", "--p", "3", "--box", "2", "--type", "I", "--type", "iv", "--json", "-"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let types: Vec<&str> = r["config"]["types"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["ty"].as_str().unwrap())
        .collect();
    assert_eq!(types, ["I", "IV"]);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let o = run(&dir.path().join("c.jsonl"), &["theta-support", "--p", "3", "--box", "0"]);
    assert_eq!(o.status.code(), Some(1), "a degenerate box is inconclusive, not a pass");
}

#[test]
fn verify_l3_is_deterministic_with_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    let first = run(&cache, &["verify-l3", "--json", "-"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let a: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(a["checks"][0]["name"], "l3-counting-route");
    assert_eq!(a["checks"][0]["actual"], a["checks"][1]["actual"]);
    let second = run(&cache, &["verify-l3", "--json", "-"]);
    let b: Value = serde_json::from_str(&stdout(&second)).unwrap();
    assert_eq!(without_timings(a), without_timings(b));
    let table = String::from_utf8(second.stderr).unwrap();
    assert!(table.contains("2/2 checks passed"));
}
