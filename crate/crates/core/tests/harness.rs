//! Report round trips, aggregation and determinism of whole experiments.

use hamcolor::harness::{
    emit_report, read_csv, read_json, records_to_rows, run_experiment, run_trial, summarize, summarize_csv, write_csv,
    write_json, ExperimentConfig, ReportFormat, Variant,
};

fn config(ns: Vec<usize>, qs: Vec<usize>, trials: usize, jobs: usize) -> ExperimentConfig {
    ExperimentConfig {
        ns,
        qs,
        trials,
        seed: 11,
        jobs,
        ..Default::default()
    }
}

#[test]
fn csv_aggregation_matches_memory_for_a_thousand_records() {
    let report = run_experiment(&config(vec![20, 30], vec![1, 2], 250, 0)).unwrap();
    assert_eq!(report.records.len(), 1000);
    let mut buf = Vec::new();
    write_csv(&report.records, &mut buf).unwrap();
    let rows = read_csv(&buf[..]).unwrap();
    assert_eq!(rows, records_to_rows(&report.records));
    assert_eq!(summarize_csv(&buf[..]).unwrap(), report.summary);
    assert_eq!(summarize(&rows), report.summary);
}

#[test]
fn json_round_trips() {
    let report = run_experiment(&config(vec![40], vec![1, 2], 5, 2)).unwrap();
    let mut buf = Vec::new();
    write_json(&report, &mut buf).unwrap();
    let back = read_json(&buf[..]).unwrap();
    assert_eq!(back, report);
}

#[test]
fn records_do_not_depend_on_thread_count() {
    let a = run_experiment(&config(vec![50, 80], vec![1, 2], 6, 1)).unwrap();
    let b = run_experiment(&config(vec![50, 80], vec![1, 2], 6, 4)).unwrap();
    let mask = |r: &hamcolor::harness::ExperimentReport| r.records.iter().map(|t| t.masked()).collect::<Vec<_>>();
    assert_eq!(mask(&a), mask(&b));
    assert_eq!(a.summary, b.summary);
}

#[test]
fn artifacts_and_reports_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(vec![40], vec![1], 2, 1);
    cfg.out = Some(dir.path().to_path_buf());
    cfg.artifacts = true;
    let report = run_experiment(&cfg).unwrap();
    let paths = emit_report(&report, dir.path(), ReportFormat::Both).unwrap();
    assert_eq!(paths.len(), 2);
    assert!(dir.path().join("artifacts/n40-q1-t0.coloring").exists());
    assert!(dir.path().join("artifacts/n40-q1-t1.coloring").exists());
}

#[test]
fn undirected_and_rainbow_trials_run() {
    for variant in [Variant::Undirected, Variant::Rainbow] {
        let mut cfg = config(vec![40], vec![1], 1, 1);
        cfg.variant = variant;
        let out = run_trial(&cfg, 40, 1, 0).unwrap();
        assert!(out.coloring.orientation.is_some());
        assert_eq!(out.rainbow_colors.is_some(), variant == Variant::Rainbow);
        assert_eq!(out.record.colors.len(), 1);
    }
    let mut bad = config(vec![40], vec![2], 1, 1);
    bad.variant = Variant::Rainbow;
    assert!(run_experiment(&bad).is_err());
}
