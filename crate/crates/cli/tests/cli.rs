use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypersteiner")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn star(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("star.stp");
    fs::write(&p, "steiner 4 3 3\ne 0 1 1\ne 0 2 1\ne 0 3 1\nterminals 1 2 3\n").unwrap();
    p
}

fn files(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for class in fs::read_dir(root).unwrap() {
        for f in fs::read_dir(class.unwrap().path()).unwrap() {
            let p = f.unwrap().path();
            out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn verify_star_reports_five_equal_optima() {
    let dir = TempDir::new().unwrap();
    let input = star(&dir);
    let report = dir.path().join("report.json");
    let out = run(&["verify", path(&input), "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["passed"], Value::Bool(true));
    for lp in ["P", "P2", "S", "D", "B"] {
        assert_eq!(json["optima"][lp], "3", "{lp}");
    }
    assert_eq!(json["opt_integral"], "3");
}

#[test]
fn gen_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for root in [&a, &b] {
        let out = run(&["gen", "--seed", "7", "--count", "4", "--out", path(root)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let fa = files(&a);
    assert_eq!(fa.len(), 12);
    assert!(fa.iter().any(|(p, _)| p == Path::new("quasibipartite/7.stp")));
    assert_eq!(fa, files(&b));
}

#[test]
fn bidirected_cap_exits_two() {
    let dir = TempDir::new().unwrap();
    let root = dir.path().join("corpus");
    let gen = run(&["gen", "--seed", "1", "--count", "1", "--vertices", "20", "--class", "general", "--out", path(&root)]);
    assert_eq!(gen.status.code(), Some(0));
    let input = root.join("general/1.stp");
    let out = run(&["solve", path(&input), "--lp", "B"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("|V| = 20"));
    assert_eq!(run(&["solve", path(&input), "--lp", "P"]).status.code(), Some(0));
}

#[test]
fn malformed_file_reports_line() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.stp");
    fs::write(&input, "steiner 3 2 2\ne 0 1 1\ne 1 2 x\nterminals 0 2\n").unwrap();
    let out = run(&["solve", path(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = star(&dir);
    assert_eq!(run(&["solve", path(&input), "--lp", "Q"]).status.code(), Some(2));
    assert_eq!(run(&["solve", path(&input), "--max-v", "30"]).status.code(), Some(2));
    assert_eq!(run(&["heuristic", path(&input), "--alg", "loss-contract", "--alpha", "1/2"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--out", path(dir.path())]).status.code(), Some(2));
    assert_eq!(run(&["solve", path(dir.path())]).status.code(), Some(2));
}

#[test]
fn corpus_outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let root = dir.path().join("corpus");
    run(&["gen", "--seed", "3", "--count", "3", "--vertices", "6", "--terminals", "3", "--out", path(&root)]);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let (json, csv) = (dir.path().join(format!("v{i}.json")), dir.path().join(format!("v{i}.csv")));
        let out = run(&["verify", path(&root), "--out", path(&json), "--csv", path(&csv)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((fs::read(&json).unwrap(), fs::read(&csv).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let json: Value = serde_json::from_slice(&outputs[0].0).unwrap();
    let ids: Vec<&str> = json.as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids[..3], ["general/3", "general/4", "general/5"]);
    let csv = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.starts_with("id,class,vertices,terminals,P,P2,S,D,B,opt,gap_B,passed,failed\n"));
}

#[test]
fn gap_and_heuristic_on_star() {
    let dir = TempDir::new().unwrap();
    let input = star(&dir);
    let gap = run(&["gap", path(&input)]);
    assert_eq!(gap.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&gap.stdout).unwrap();
    assert_eq!(json["gap_P"], "1");
    assert_eq!(json["heuristics"]["ratio_greedy"], "3");

    let trace = run(&["heuristic", path(&input), "--alg", "loss-contract", "--alpha", "sqrt3"]);
    assert_eq!(trace.status.code(), Some(0));
    let lines: Vec<Value> =
        String::from_utf8(trace.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[3]["fired"], Value::Bool(true));
    assert_eq!(lines[4]["summary"]["cost"], "3");
    assert_eq!(lines[4]["summary"]["within_bound"], Value::Bool(true));

    let greedy = run(&["heuristic", path(&input), "--alg", "ratio-greedy"]);
    let last: Value = serde_json::from_str(String::from_utf8(greedy.stdout).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["cost"], "3");
}
