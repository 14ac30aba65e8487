mod common;

use std::io::Write;

use common::blob_dataset;
use dsvm::baselines::ResourceCap;
use dsvm::data::PartitionSpec;
use dsvm::experiment::{
    cmd_run, render, run_fixture, run_on_dataset, ExperimentConfig, ExperimentReport, Format, Method, MethodStatus, RunError, RunMode,
};

fn config(sizes: Vec<usize>) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_json(r#"{"dataset": {"path": "blobs.csv"}, "test_size": 60, "partition": {"sizes": [1]}}"#).unwrap();
    c.partition = PartitionSpec::new(sizes);
    c.seed = 5;
    c.timing_repeats = 1;
    c
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn all_three_methods_report_results() {
    let report = run_on_dataset(&config(vec![80, 80, 80]), blob_dataset(2, 3, 100, 2, 1.5)).unwrap();
    assert_eq!(report.mode, RunMode::Train);
    assert_eq!(report.methods.iter().map(|m| m.method).collect::<Vec<_>>(), Method::ALL.to_vec());
    assert!(report
        .methods
        .iter()
        .all(|m| m.status == MethodStatus::Completed && m.accuracy.is_some()));

    let dsvm = report.method(Method::Dsvm).unwrap();
    let per_site: Vec<f64> = report.sites.iter().map(|s| s.train_seconds.unwrap()).collect();
    assert_eq!(dsvm.train_seconds.unwrap(), per_site.iter().copied().fold(0.0, f64::max));
    assert_eq!(dsvm.models_evaluated, Some(1));
    assert_eq!(report.method(Method::Ensemble).unwrap().models_evaluated, Some(3));
    let elected = dsvm.elected_site.unwrap();
    assert!((1..=3).contains(&elected));
    assert_eq!(report.election.as_ref().unwrap().global_model() + 1, elected);

    let d = report.dataset.as_ref().unwrap();
    assert_eq!((d.rows, d.train_rows, d.test_rows, d.classes), (300, 240, 60, 3));
    let b = report.broadcast.as_ref().unwrap();
    assert_eq!(b.bytes_transferred, 2 * b.payload_bytes);
}

#[test]
fn dsvm_only_omits_baselines() {
    let mut c = config(vec![100, 100]);
    c.methods = vec![Method::Dsvm];
    let report = run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)).unwrap();
    assert_eq!(report.methods.len(), 1);
    assert!(report.method(Method::Centralized).is_none());
}

#[test]
fn centralized_only_skips_sites() {
    let mut c = config(vec![240]);
    c.methods = vec![Method::Centralized];
    let report = run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)).unwrap();
    assert!(report.sites.is_empty() && report.election.is_none());
}

#[test]
fn same_seed_same_report_at_any_thread_count() {
    let data = blob_dataset(9, 4, 60, 3, 2.0);
    let mut c = config(vec![60, 60, 60]);
    c.threads = Some(1);
    let one = run_on_dataset(&c, data.clone()).unwrap().without_timings();
    c.threads = Some(4);
    let four = run_on_dataset(&c, data.clone()).unwrap().without_timings();
    assert_eq!(one, four);
    c.seed = 6;
    let other = run_on_dataset(&c, data).unwrap().without_timings();
    assert_ne!(one.sites, other.sites);
}

#[test]
fn capped_centralized_failure_is_recorded() {
    let mut c = config(vec![80, 80, 80]);
    c.resource_cap = ResourceCap {
        max_training_rows: Some(100),
    };
    let report = run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)).unwrap();
    let central = report.method(Method::Centralized).unwrap();
    assert_eq!(central.status, MethodStatus::Failed);
    assert!(central.failure.as_ref().unwrap().contains("100"));
    assert_eq!(report.method(Method::Dsvm).unwrap().status, MethodStatus::Completed);

    let table = render(&report, Format::Table);
    let acc = table.lines().find(|l| l.starts_with("Accuracy")).unwrap();
    assert_eq!(acc.split_whitespace().nth(2), Some("-"));
    assert!(table.contains("Centralized failed"));
}

#[test]
fn every_method_failing_is_its_own_error() {
    let mut c = config(vec![80, 80, 80]);
    c.resource_cap = ResourceCap {
        max_training_rows: Some(10),
    };
    match run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)) {
        Err(e @ RunError::AllMethodsFailed(_)) => {
            assert_eq!(e.exit_code(), 3);
            let RunError::AllMethodsFailed(report) = e else { unreachable!() };
            assert_eq!(report.failures().count(), 3);
        }
        other => panic!("expected AllMethodsFailed, got {other:?}"),
    }
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let mut c = config(vec![80, 80]);
    c.methods.clear();
    assert_eq!(run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)).unwrap_err().exit_code(), 1);
    let c = config(vec![200, 200]);
    assert_eq!(run_on_dataset(&c, blob_dataset(2, 3, 100, 2, 1.5)).unwrap_err().exit_code(), 2);
}

#[test]
fn csv_projects_json_field_for_field() {
    let report = run_on_dataset(&config(vec![80, 80, 80]), blob_dataset(2, 3, 100, 2, 1.5)).unwrap();
    let json: ExperimentReport = serde_json::from_str(&render(&report, Format::Json)).unwrap();
    assert_eq!(json, report);
    let csv = render(&report, Format::Csv);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), json.methods.len());
    for (row, m) in rows.iter().zip(&json.methods) {
        assert_eq!(&row[0], m.method.as_str());
        assert_eq!(row[2].parse::<f64>().unwrap(), m.accuracy.unwrap());
        assert_eq!(row[3].parse::<f64>().unwrap(), m.train_seconds.unwrap());
        assert_eq!(row[4].parse::<f64>().unwrap(), m.test_seconds.unwrap());
        assert_eq!(row[5].parse::<usize>().ok(), m.elected_site);
        assert_eq!(row[6].parse::<usize>().ok(), m.models_evaluated);
    }
}

#[test]
fn fixture_mode_elects_without_training() {
    let report = run_fixture(fixture("sdss")).unwrap();
    assert_eq!(report.mode, RunMode::Fixture);
    assert_eq!(report.methods[0].status, MethodStatus::ElectionOnly);
    assert_eq!(report.methods[0].elected_site, Some(4));
    assert!(render(&report, Format::Table).contains("elected: SVM_4"));
    assert_eq!(run_fixture("/nonexistent/matrix.json").unwrap_err().exit_code(), 2);
}

#[test]
fn cmd_run_reads_csv_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let data = blob_dataset(4, 3, 40, 2, 1.0);
    let mut f = std::fs::File::create(dir.path().join("blobs.csv")).unwrap();
    writeln!(f, "x,y,class").unwrap();
    for e in &data.examples {
        let x = e.features.as_slice();
        writeln!(f, "{},{},c{}", x[0], x[1], e.label.0).unwrap();
    }
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"dataset": {"path": "blobs.csv", "has_header": true, "label_column": "class"},
            "test_size": 30, "partition": {"sizes": [45, 45]}, "timing_repeats": 1}"#,
    )
    .unwrap();
    let config = ExperimentConfig::load(&cfg, &["train.c=2".into()]).unwrap();
    assert_eq!(config.train.c, 2.0);
    let report = cmd_run(&config).unwrap();
    assert_eq!(report.name, "blobs");
    assert_eq!(report.dataset.as_ref().unwrap().classes, 3);
    assert!(report.method(Method::Centralized).unwrap().accuracy.unwrap() > 90.0);
}
