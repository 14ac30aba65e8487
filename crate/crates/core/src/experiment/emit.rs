use std::fmt::Write as _;
use std::str::FromStr;

use super::report::{ExperimentReport, MethodReport};
use super::{Method, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

impl FromStr for Format {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(RunError::Config(format!("unknown emit format {other:?} (json, csv, table)"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 8] = [
    "method",
    "status",
    "accuracy",
    "train_seconds",
    "test_seconds",
    "elected_site",
    "models_evaluated",
    "failure",
];

/// Renders a report. JSON is the full, lossless report; CSV has one row per
/// method; the table is meant for terminals.
pub fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(report),
        Format::Table => render_table(report),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for m in &report.methods {
        let status = serde_json::to_value(m.status).expect("status serializes");
        w.write_record([
            m.method.as_str().to_string(),
            status.as_str().unwrap_or_default().to_string(),
            opt(m.accuracy),
            opt(m.train_seconds),
            opt(m.test_seconds),
            opt(m.elected_site),
            opt(m.models_evaluated),
            m.failure.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

type CellFn = Box<dyn Fn(&MethodReport) -> Option<String>>;

fn cell(m: Option<&MethodReport>, f: impl Fn(&MethodReport) -> Option<String>) -> String {
    m.filter(|m| !m.is_failure()).and_then(f).unwrap_or_else(|| "-".into())
}

fn render_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({} mode, seed {})", report.name, mode_name(report), report.seed);
    if let Some(d) = &report.dataset {
        let _ = writeln!(
            out,
            "data: {} rows, {} features, {} classes; {} train / {} test; sites {:?}",
            d.rows, d.features, d.classes, d.train_rows, d.test_rows, d.site_sizes
        );
    }
    out.push('\n');

    let widths = [16, 12, 12, 12];
    let header: Vec<String> = std::iter::once(String::new())
        .chain(Method::ALL.iter().map(|m| m.title().to_string()))
        .collect();
    row(&mut out, &header, &widths);
    let get = |method| report.method(method);
    let lines: [(&str, CellFn); 4] = [
        ("Accuracy (%)", Box::new(|m| m.accuracy.map(|a| format!("{a:.2}")))),
        ("Training (s)", Box::new(|m| m.train_seconds.map(|t| format!("{t:.4}")))),
        ("Testing (s)", Box::new(|m| m.test_seconds.map(|t| format!("{t:.4}")))),
        ("Models/predict", Box::new(|m| m.models_evaluated.map(|n| n.to_string()))),
    ];
    for (label, f) in &lines {
        let mut cells = vec![label.to_string()];
        for method in Method::ALL {
            cells.push(cell(get(method), f));
        }
        row(&mut out, &cells, &widths);
    }
    for m in &report.methods {
        if let Some(reason) = &m.failure {
            let _ = writeln!(out, "{} failed: {reason}", m.method.title());
        }
    }

    if !report.sites.is_empty() {
        out.push_str("\nsite  rows     train (s)  train acc  test acc\n");
        for s in &report.sites {
            let _ = writeln!(
                out,
                "{:<5} {:<8} {:<10} {:<10.2} {:.2}",
                s.site_id,
                s.rows,
                s.train_seconds.map(|t| format!("{t:.4}")).unwrap_or_else(|| "-".into()),
                s.training_accuracy,
                s.test_accuracy
            );
        }
    }

    if let Some(e) = &report.election {
        let n = e.matrix.n();
        out.push_str("\naccuracy matrix (row = model, column = site)\n");
        let _ = write!(out, "{:<8}", "");
        for j in 0..n {
            let _ = write!(out, "{:>9}", format!("site {}", j + 1));
        }
        out.push('\n');
        for i in 0..n {
            let _ = write!(out, "{:<8}", format!("SVM_{}", i + 1));
            for j in 0..n {
                let v = e.matrix.get(i, j);
                if i == j {
                    let _ = write!(out, "{:>9}", "-");
                } else {
                    let _ = write!(out, "{v:>9.2}");
                }
            }
            out.push('\n');
        }
        out.push_str("\nbest model per site\n");
        for b in &e.result.best.rows {
            let _ = writeln!(
                out,
                "site {}: SVM_{} ({:.2})",
                b.site + 1,
                b.model + 1,
                e.matrix.get(b.model, b.site)
            );
        }
        let _ = writeln!(
            out,
            "\nelected: SVM_{} (named by {} sites)",
            e.global_model() + 1,
            e.result.counts[e.global_model()]
        );
    }
    if let Some(b) = &report.broadcast {
        let _ = writeln!(
            out,
            "broadcast: {} bytes to {} sites ({} total); raw shards {} bytes",
            b.payload_bytes, b.recipients, b.bytes_transferred, b.shard_bytes
        );
    }
    out
}

fn mode_name(report: &ExperimentReport) -> &'static str {
    match report.mode {
        super::RunMode::Train => "train",
        super::RunMode::Fixture => "fixture",
    }
}

fn row(out: &mut String, cells: &[String], widths: &[usize]) {
    for (c, w) in cells.iter().zip(widths) {
        let _ = write!(out, "{c:<w$}");
    }
    out.push('\n');
}
