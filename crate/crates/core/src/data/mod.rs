//! Dataset ingestion and preparation.
//!
//! CSV is the only ingestion format. Each row holds `q` feature columns and
//! one label column; labels are mapped to [`ClassLabel`] indices through the
//! schema's ordered class-name table.

mod partition;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ovo::{ClassLabel, Example};
use crate::svm::FeatureVector;

pub use partition::{partition_horizontal, train_test_split, PartitionSpec};

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub feature_count: usize,
    pub label_column: LabelColumn,
    /// External class names; position `k` is `ClassLabel(k)`.
    pub class_names: Vec<String>,
    #[serde(default)]
    pub has_header: bool,
}

impl DatasetSchema {
    pub fn validate(&self) -> Result<()> {
        if self.feature_count == 0 {
            return Err(Error::Schema("feature_count must be at least 1".into()));
        }
        let distinct: BTreeSet<&String> = self.class_names.iter().collect();
        if distinct.len() != self.class_names.len() {
            return Err(Error::Schema("class names must be distinct".into()));
        }
        if matches!(self.label_column, LabelColumn::Name(_)) && !self.has_header {
            return Err(Error::Schema("label column by name needs a header row".into()));
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn label_of(&self, name: &str) -> Option<ClassLabel> {
        self.class_names.iter().position(|n| n == name).map(ClassLabel)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: DatasetSchema,
    pub examples: Vec<Example>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Number of classes actually present.
    pub fn distinct_classes(&self) -> usize {
        self.examples.iter().map(|e| e.label).collect::<BTreeSet<_>>().len()
    }
}

/// Raw size of `examples` as dense binary64 features plus a 4-byte label.
pub fn payload_bytes(examples: &[Example]) -> usize {
    examples.iter().map(|e| e.features.len() * 8 + 4).sum()
}

fn read_records(path: &Path, has_header: bool) -> Result<(Option<csv::StringRecord>, Vec<csv::StringRecord>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header = if has_header { Some(reader.headers()?.clone()) } else { None };
    let records = reader.records().collect::<Result<Vec<_>, _>>()?;
    Ok((header, records))
}

fn resolve_label_column(column: &LabelColumn, header: Option<&csv::StringRecord>) -> Result<usize> {
    match column {
        LabelColumn::Index(i) => Ok(*i),
        LabelColumn::Name(name) => header
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::Schema(format!("label column {name:?} not found in header"))),
    }
}

/// Line number of record `idx` in the file, counting the header.
fn line_of(idx: usize, has_header: bool) -> usize {
    idx + 1 + usize::from(has_header)
}

/// Builds a schema by scanning the file.
///
/// `label_column = None` selects the last column. Class names are the
/// distinct label strings, sorted numerically when every label parses as a
/// number and lexicographically otherwise.
pub fn infer_schema(path: impl AsRef<Path>, has_header: bool, label_column: Option<LabelColumn>) -> Result<DatasetSchema> {
    let (header, records) = read_records(path.as_ref(), has_header)?;
    let width = header
        .as_ref()
        .map(|h| h.len())
        .or_else(|| records.first().map(|r| r.len()))
        .ok_or(Error::EmptyInput("csv file"))?;
    if width < 2 {
        return Err(Error::Schema("need at least one feature column and a label column".into()));
    }
    let label_column = label_column.unwrap_or(LabelColumn::Index(width - 1));
    let label_idx = resolve_label_column(&label_column, header.as_ref())?;
    if label_idx >= width {
        return Err(Error::Schema(format!("label column {label_idx} out of range for {width} columns")));
    }
    let mut labels = BTreeSet::new();
    for (idx, r) in records.iter().enumerate() {
        let label = r.get(label_idx).ok_or_else(|| Error::MalformedRow {
            row: line_of(idx, has_header),
            message: format!("expected {width} columns, found {}", r.len()),
        })?;
        labels.insert(label.to_string());
    }
    let mut class_names: Vec<String> = labels.into_iter().collect();
    let numeric: Option<Vec<f64>> = class_names.iter().map(|s| s.parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut order: Vec<usize> = (0..class_names.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        class_names = order.into_iter().map(|i| class_names[i].clone()).collect();
    }
    let schema = DatasetSchema {
        feature_count: width - 1,
        label_column,
        class_names,
        has_header,
    };
    schema.validate()?;
    Ok(schema)
}

/// Reads `path` according to `schema`, preserving row order.
pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset> {
    schema.validate()?;
    let (header, records) = read_records(path.as_ref(), schema.has_header)?;
    let label_idx = resolve_label_column(&schema.label_column, header.as_ref())?;
    let width = schema.feature_count + 1;
    if label_idx >= width {
        return Err(Error::Schema(format!("label column {label_idx} out of range for {width} columns")));
    }
    let mut examples = Vec::with_capacity(records.len());
    for (idx, record) in records.iter().enumerate() {
        let row = line_of(idx, schema.has_header);
        if record.len() != width {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        let mut features = Vec::with_capacity(schema.feature_count);
        let mut label = None;
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                label = Some(field);
                continue;
            }
            let value: f64 = field.parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("column {col}: cannot parse {field:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("column {col}: non-finite value {field:?}"),
                });
            }
            features.push(value);
        }
        let label = label.unwrap_or_default();
        let class = schema.label_of(label).ok_or_else(|| Error::UnknownLabel {
            row,
            label: label.to_string(),
        })?;
        examples.push(Example::new(FeatureVector::new(features)?, class));
    }
    Ok(Dataset {
        schema: schema.clone(),
        examples,
    })
}

/// Per-feature min-max scaling onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(examples: &[Example]) -> Result<Self> {
        let first = examples.first().ok_or(Error::EmptyInput("scaler fit set"))?;
        let mut min = first.features.as_slice().to_vec();
        let mut max = min.clone();
        for e in examples {
            for (k, &v) in e.features.as_slice().iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Ok(Self { min, max })
    }

    /// Constant columns map to 0.
    pub fn transform(&self, examples: &mut [Example]) {
        for e in examples {
            let mut v = std::mem::replace(&mut e.features, FeatureVector(Vec::new())).into_inner();
            for (k, x) in v.iter_mut().enumerate() {
                let range = self.max[k] - self.min[k];
                *x = if range > 0.0 { (*x - self.min[k]) / range } else { 0.0 };
            }
            e.features = FeatureVector(v);
        }
    }
}
