use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::RunError;
use crate::baselines::ResourceCap;
use crate::data::{LabelColumn, PartitionSpec};
use crate::protocol::EvalPolicy;
use crate::svm::TrainParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Centralized,
    Ensemble,
    Dsvm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Centralized, Method::Ensemble, Method::Dsvm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Centralized => "centralized",
            Method::Ensemble => "ensemble",
            Method::Dsvm => "dsvm",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Method::Centralized => "Centralized",
            Method::Ensemble => "Ensemble",
            Method::Dsvm => "DSVM",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "centralized" => Ok(Method::Centralized),
            "ensemble" => Ok(Method::Ensemble),
            "dsvm" => Ok(Method::Dsvm),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Parses a comma-separated method list such as `dsvm,ensemble`.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    None,
    /// Min-max bounds fitted on the pooled training portion, applied everywhere.
    MinMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub has_header: bool,
    /// Defaults to the last column.
    #[serde(default)]
    pub label_column: Option<LabelColumn>,
    /// Inferred from the file when absent.
    #[serde(default)]
    pub class_names: Option<Vec<String>>,
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_repeats() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: DatasetConfig,
    /// Size of the global held-out test set.
    pub test_size: usize,
    pub partition: PartitionSpec,
    #[serde(default)]
    pub train: TrainParams,
    #[serde(default)]
    pub eval_policy: EvalPolicy,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scaling: Scaling,
    /// Worker threads for training and evaluation; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Timings are the median over this many repetitions.
    #[serde(default = "default_repeats")]
    pub timing_repeats: usize,
    #[serde(default)]
    pub resource_cap: ResourceCap,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    /// Reads a config file, applying `overrides` (`dotted.path=json`) first.
    ///
    /// A relative dataset path is resolved against the config file's directory.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self, RunError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text).map_err(|e| RunError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let mut config: Self = serde_json::from_value(value).map_err(|e| RunError::Config(e.to_string()))?;
        if config.dataset.path.is_relative() {
            if let Some(dir) = path.parent() {
                config.dataset.path = dir.join(&config.dataset.path);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let err = |m: String| Err(RunError::Config(m));
        if self.methods.is_empty() {
            return err("at least one method must be requested".into());
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return err("duplicate method in list".into());
        }
        if let Err(e) = self.train.validate() {
            return err(e.to_string());
        }
        if let Err(e) = self.eval_policy.validate() {
            return err(e.to_string());
        }
        if self.partition.sizes.is_empty() || self.partition.sizes.contains(&0) {
            return err("partition sizes must be non-empty and positive".into());
        }
        let distributed = self.methods.iter().any(|m| matches!(m, Method::Dsvm | Method::Ensemble));
        if distributed && self.partition.sizes.len() < 2 {
            return err("dsvm and ensemble need at least 2 sites".into());
        }
        if self.test_size == 0 {
            return err("test_size must be positive".into());
        }
        if self.timing_repeats == 0 {
            return err("timing_repeats must be at least 1".into());
        }
        if self.threads == Some(0) {
            return err("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }
}

/// Applies `a.b.c=value` to a JSON document. `value` is parsed as JSON,
/// falling back to a plain string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), RunError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| RunError::Config(format!("override {assignment:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (idx, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| RunError::Config(format!("override {key:?}: {part:?} is not inside an object")))?;
        if idx + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dataset": {"path": "data.csv"},
        "test_size": 10,
        "partition": {"sizes": [20, 20]}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.methods, Method::ALL.to_vec());
        assert_eq!(c.train, TrainParams::default());
        assert_eq!(c.eval_policy, EvalPolicy::FullLocal);
        assert_eq!(c.timing_repeats, 3);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        let text = MINIMAL.replace("\"test_size\"", "\"tset_size\": 1, \"test_size\"");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(RunError::Config(_))));
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        apply_override(&mut v, "train.c=10").unwrap();
        apply_override(&mut v, "partition.sizes=[5,5,5]").unwrap();
        apply_override(&mut v, "name=pen").unwrap();
        let c: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert_eq!(c.train.c, 10.0);
        assert_eq!(c.partition.sizes, vec![5, 5, 5]);
        assert_eq!(c.name.as_deref(), Some("pen"));
    }

    #[test]
    fn method_list_parsing() {
        assert_eq!(parse_methods("dsvm,ensemble").unwrap(), vec![Method::Dsvm, Method::Ensemble]);
        assert!(parse_methods("dsvm,svm").is_err());
    }

    #[test]
    fn single_site_needs_centralized_only() {
        let mut c = ExperimentConfig::from_json(MINIMAL).unwrap();
        c.partition.sizes = vec![40];
        assert!(c.validate().is_err());
        c.methods = vec![Method::Centralized];
        assert!(c.validate().is_ok());
    }
}
