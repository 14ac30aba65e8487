use serde::{Deserialize, Serialize};

use super::Method;
use crate::protocol::ElectionTrace;

pub const TIME_UNIT: &str = "seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Train,
    /// Election from an injected accuracy matrix, no training.
    Fixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodStatus {
    Completed,
    Failed,
    ElectionOnly,
}

/// One row of the method comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub status: MethodStatus,
    /// Percent correct on the global test set.
    pub accuracy: Option<f64>,
    pub train_seconds: Option<f64>,
    pub test_seconds: Option<f64>,
    /// 1-based site whose model was elected (dsvm only).
    pub elected_site: Option<usize>,
    /// Models invoked per test prediction.
    pub models_evaluated: Option<usize>,
    pub failure: Option<String>,
}

impl MethodReport {
    pub fn failed(method: Method, reason: impl Into<String>) -> Self {
        Self {
            method,
            status: MethodStatus::Failed,
            accuracy: None,
            train_seconds: None,
            test_seconds: None,
            elected_site: None,
            models_evaluated: None,
            failure: Some(reason.into()),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.status == MethodStatus::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub path: String,
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub site_sizes: Vec<usize>,
}

/// Per-site training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteReport {
    pub site_id: usize,
    pub rows: usize,
    pub train_seconds: Option<f64>,
    /// Accuracy of the local model on its own training shard.
    pub training_accuracy: f64,
    /// Accuracy of the local model on the global test set.
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastReport {
    pub payload_bytes: usize,
    pub bytes_transferred: usize,
    pub recipients: usize,
    /// Raw size of all shards combined, for comparison with shipping the data.
    pub shard_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub mode: RunMode,
    pub seed: u64,
    pub time_unit: String,
    pub dataset: Option<DatasetSummary>,
    pub methods: Vec<MethodReport>,
    pub sites: Vec<SiteReport>,
    pub election: Option<ElectionTrace>,
    pub broadcast: Option<BroadcastReport>,
}

impl ExperimentReport {
    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn failures(&self) -> impl Iterator<Item = &MethodReport> {
        self.methods.iter().filter(|m| m.is_failure())
    }

    pub fn all_failed(&self) -> bool {
        !self.methods.is_empty() && self.methods.iter().all(MethodReport::is_failure)
    }

    /// Copy with every wall-clock field cleared, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for m in &mut r.methods {
            m.train_seconds = None;
            m.test_seconds = None;
        }
        for s in &mut r.sites {
            s.train_seconds = None;
        }
        r
    }
}
