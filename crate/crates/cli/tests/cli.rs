//! End-to-end runs of the `hamcolor` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hamcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamcolor"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_stats_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamcolor(&[
        "simulate",
        "--n",
        "60,80",
        "--q",
        "1,2",
        "--trials",
        "2",
        "--seed",
        "4",
        "--jobs",
        "1",
        "--out",
        path(dir.path()),
        "--artifacts",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("tau/nln"));
    let csv = dir.path().join("records.csv");
    assert!(dir.path().join("report.json").exists());

    let st = hamcolor(&["stats", "--csv", path(&csv)]);
    assert!(st.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 4);
    assert!(summary.as_array().unwrap().iter().all(|g| g["trials"] == 2));

    let coloring = dir.path().join("artifacts/n60-q2-t0.coloring");
    let v = hamcolor(&["verify", "--coloring", path(&coloring)]);
    assert!(v.status.success());
    let verdicts: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(verdicts[0]["check"], "color-degree");
}

#[test]
fn hamilton_cycle_verifies_against_a_matching_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let cycle_path = dir.path().join("h.cycle");
    let out = hamcolor(&["hamilton", "--n", "300", "--seed", "3", "--out", path(&cycle_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stats["success"], true);

    let text = fs::read_to_string(&cycle_path).unwrap();
    let vs: Vec<usize> = text.split_whitespace().map(|f| f.parse().unwrap()).collect();
    let mut sorted = vs.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (1..=300).collect::<Vec<_>>());

    // a one-color coloring whose arcs are exactly the cycle
    let mut col = String::from("300 1 300 0 0 0\n");
    for i in 0..300 {
        col.push_str(&format!("{} {} 1\n", vs[i], vs[(i + 1) % 300]));
    }
    let col_path = dir.path().join("c.coloring");
    fs::write(&col_path, col).unwrap();
    let colored = dir.path().join("c.cycle");
    fs::write(&colored, format!("# color 1\n{text}")).unwrap();
    let v = hamcolor(&["verify", "--coloring", path(&col_path), "--cycle", path(&colored)]);
    assert!(v.status.success(), "{}", stdout(&v));

    // swapping two vertices breaks it
    let mut bad = vs.clone();
    bad.swap(0, 1);
    let line: Vec<String> = bad.iter().map(|v| v.to_string()).collect();
    let broken = dir.path().join("b.cycle");
    fs::write(&broken, format!("# color 1\n{}\n", line.join(" "))).unwrap();
    let v = hamcolor(&["verify", "--coloring", path(&col_path), "--cycle", path(&broken)]);
    assert!(!v.status.success());
    assert!(stdout(&v).contains("\"pass\": false"));
}

#[test]
fn hamilton_from_files() {
    let dir = tempfile::tempdir().unwrap();
    // two 3-cycles; pool arcs allow joining them
    let factor = dir.path().join("f.txt");
    fs::write(&factor, "1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n").unwrap();
    let arcs = dir.path().join("a.txt");
    let mut all = String::new();
    for a in 1..=6 {
        for b in 1..=6 {
            if a != b {
                all.push_str(&format!("{a} {b}\n"));
            }
        }
    }
    fs::write(&arcs, all).unwrap();
    let out = hamcolor(&[
        "hamilton",
        "--factor",
        path(&factor),
        "--arcs",
        path(&arcs),
        "--seed",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let vs: Vec<usize> = stdout(&out).split_whitespace().map(|f| f.parse().unwrap()).collect();
    assert_eq!(vs.len(), 6);
}

#[test]
fn invalid_requests_fail() {
    let out = hamcolor(&["simulate", "--n", "50", "--q", "2", "--mode", "rainbow"]);
    assert!(!out.status.success());
    let out = hamcolor(&["hamilton"]);
    assert!(!out.status.success());
    let out = hamcolor(&["simulate", "--n", "50", "--alpha", "0.9"]);
    assert!(!out.status.success());
}
