use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn schatten(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schatten"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCHATTEN_SEED")
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn without_wall_time(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == "wall_time_s").unwrap();
    r.records()
        .map(|rec| {
            let mut v: Vec<String> = rec.unwrap().iter().map(str::to_string).collect();
            v.remove(idx);
            v
        })
        .collect()
}

#[test]
fn identity_lp_fixture_is_primal() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eye.csv"), "d,n\n2,2\n1,0\n0,1\n").unwrap();
    let out = schatten(dir.path(), &["solve-lp", "--instance", "eye.csv", "--out", "res"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res/results.csv");
    assert_eq!(column(&res, "verdict"), vec!["primal"]);
    assert_eq!(column(&res, "check"), vec!["pass"]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("res/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_checks_passed"], true);
    assert_eq!(summary["invariant_violations"]["potential_monotonicity"], 0);
}

#[test]
fn reruns_are_identical_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = schatten(dir.path(), &["solve-sdp", "--seeds", "2", "--seed", "5", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(without_wall_time(&a.join("results.csv")), without_wall_time(&b.join("results.csv")));
    for f in ["solutions/packing-sdp_exact_seed5.json", "solutions/packing-sdp_exact_seed6.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let strip = |p: &Path| fs::read_to_string(p).unwrap().replace("\"a\"", "").replace("\"b\"", "");
    assert_eq!(strip(&a.join("summary.json")), strip(&b.join("summary.json")));
}

#[test]
fn flags_take_precedence_over_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"eps": 0.2, "seed": 3, "instance": {"generator": {"kind": "random-lp", "n": 4, "d": 3}}}"#,
    )
    .unwrap();
    let o = schatten(dir.path(), &["solve-lp", "--config", "cfg.json", "--eps", "0.05", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    let res = dir.path().join("r/results.csv");
    assert_eq!(column(&res, "eps")[0].parse::<f64>().unwrap(), 0.05);
    assert_eq!(column(&res, "seed"), vec!["3"]);
    assert_eq!(column(&res, "n"), vec!["4"]);
}

#[test]
fn env_seed_is_the_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_schatten"))
        .args(["solve-lp", "--out", "r"])
        .current_dir(dir.path())
        .env("SCHATTEN_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(column(&dir.path().join("r/results.csv"), "seed"), vec!["11"]);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "{\n  \"eps\": 0.1,\n  \"epsilon\": 2\n}").unwrap();
    let o = schatten(dir.path(), &["solve-lp", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("epsilon") && err.contains("line 3"), "{err}");
    assert_eq!(schatten(dir.path(), &["solve-lp", "--eps", "0.9"]).status.code(), Some(1));
    assert_eq!(schatten(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(schatten(dir.path(), &["solve-lp", "--instance", "missing.csv"]).status.code(), Some(1));
}

#[test]
fn tampered_certificate_fails_check_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eye.csv"), "d,n\n2,2\n1,0\n0,1\n").unwrap();
    assert_eq!(schatten(dir.path(), &["solve-lp", "--instance", "eye.csv", "--out", "r"]).status.code(), Some(0));
    let res = dir.path().join("r/results.csv");
    assert_eq!(schatten(dir.path(), &["check", "r/results.csv"]).status.code(), Some(0));
    let sol = dir.path().join("r").join(&column(&res, "solution")[0]);
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    json["verdict"]["Primal"] = serde_json::json!([0.9, 0.9]);
    fs::write(&sol, json.to_string()).unwrap();
    let o = schatten(dir.path(), &["check", "r/results.csv"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn filter_with_naive_baseline_gives_paired_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = schatten(dir.path(), &["pca-filter", "--seeds", "3", "--naive", "--trace", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let res = dir.path().join("r/results.csv");
    let methods = column(&res, "method");
    assert_eq!(methods, vec!["naive", "robust", "naive", "robust", "naive", "robust"]);
    let seeds = column(&res, "seed");
    assert_eq!(seeds, vec!["0", "0", "1", "1", "2", "2"]);
    assert!(dir.path().join("r/traces/filter-pca_robust_seed0.csv").exists());
    assert_eq!(schatten(dir.path(), &["check", "r/results.csv"]).status.code(), Some(0));
}

#[test]
fn sweep_rows_are_sorted_by_eps_then_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = schatten(
        dir.path(),
        &["sweep", "--task", "filter-pca", "--eps-list", "0.1,0.05", "--seeds", "2", "--out", "r"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let res = dir.path().join("r/results.csv");
    assert_eq!(rows(&res).len(), 4);
    let eps: Vec<f64> = column(&res, "eps").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(eps, vec![0.05, 0.05, 0.1, 0.1]);
    assert_eq!(column(&res, "seed"), vec!["0", "1", "0", "1"]);
}

#[test]
fn lp_trace_records_potentials() {
    let dir = tempfile::tempdir().unwrap();
    let o = schatten(dir.path(), &["solve-lp", "--p", "inf", "--trace", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    let trace = dir.path().join("r/traces/packing-lp_solver_seed0.csv");
    let n = rows(&trace).len();
    let iters: usize = column(&dir.path().join("r/results.csv"), "iterations")[0].parse().unwrap();
    assert_eq!(n, iters + 1);
}

#[test]
fn oversized_items_are_recorded_as_preprocessed_away() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("big.csv"), "d,n\n1,2\n100,100\n").unwrap();
    let o = schatten(dir.path(), &["solve-lp", "--instance", "big.csv", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let res = dir.path().join("r/results.csv");
    assert_eq!(column(&res, "verdict"), vec!["infeasible-after-preprocessing"]);
    assert_eq!(schatten(dir.path(), &["check", "r/results.csv"]).status.code(), Some(0));
}
