//! Comparison methods: centralized training on the union of all shards, and
//! an ensemble that majority-votes over every local model at test time.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ovo::{accuracy_percent, predict_ovo, train_ovo, ClassLabel, Example, OvoModel};
use crate::protocol::SiteData;
use crate::svm::TrainParams;

/// Limits enforced before a training run starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResourceCap {
    /// Largest training set a single site may hold.
    #[serde(default)]
    pub max_training_rows: Option<usize>,
}

impl ResourceCap {
    pub fn check(&self, rows: usize) -> Result<()> {
        match self.max_training_rows {
            Some(limit) if rows > limit => Err(Error::ResourceExhausted { rows, limit }),
            _ => Ok(()),
        }
    }
}

/// Runs `f`, turning a panic into [`Error::Crashed`].
pub(crate) fn guarded<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic during training".into());
            Err(Error::Crashed(msg))
        }
    }
}

#[derive(Debug, Clone)]
pub struct CentralizedFit {
    pub model: OvoModel,
    pub train_seconds: f64,
}

/// Concatenates the shards in site order into one training set.
pub fn pool_sites(sites: &[SiteData]) -> Vec<Example> {
    sites.iter().flat_map(|s| s.examples.iter().cloned()).collect()
}

/// Trains a single model on the union of all shards.
///
/// Exceeding `cap` or crashing inside the solver is reported as an error
/// rather than propagated as a panic.
pub fn train_centralized(sites: &[SiteData], params: &TrainParams, cap: &ResourceCap) -> Result<CentralizedFit> {
    let rows: usize = sites.iter().map(SiteData::len).sum();
    cap.check(rows)?;
    let pooled = pool_sites(sites);
    let start = Instant::now();
    let model = guarded(|| train_ovo(&pooled, params))?;
    Ok(CentralizedFit {
        model,
        train_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct EnsembleModel {
    members: Vec<OvoModel>,
    dim: usize,
}

impl EnsembleModel {
    pub fn new(members: Vec<OvoModel>) -> Result<Self> {
        let dim = members.first().map(OvoModel::dim).ok_or(Error::EmptyInput("ensemble members"))?;
        if let Some(m) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
        Ok(Self { members, dim })
    }

    pub fn members(&self) -> &[OvoModel] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Majority class among member predictions; ties go to the smallest label.
pub(crate) fn majority(predictions: impl IntoIterator<Item = ClassLabel>) -> Option<ClassLabel> {
    let mut tally: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for p in predictions {
        *tally.entry(p).or_default() += 1;
    }
    let mut best: Option<(ClassLabel, usize)> = None;
    for (label, count) in tally {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label, count));
        }
    }
    best.map(|(l, _)| l)
}

/// One member, one vote over final class predictions.
pub fn predict_ensemble(ensemble: &EnsembleModel, z: &[f64]) -> Result<ClassLabel> {
    if z.len() != ensemble.dim {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim,
            found: z.len(),
        });
    }
    let predictions = ensemble.members.iter().map(|m| predict_ovo(m, z)).collect::<Result<Vec<_>>>()?;
    Ok(majority(predictions).expect("ensemble has members"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleEvaluation {
    pub accuracy: f64,
    /// Wall time covering every member's predictions.
    pub test_seconds: f64,
}

pub fn evaluate_ensemble(ensemble: &EnsembleModel, test: &[Example]) -> Result<EnsembleEvaluation> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    let start = Instant::now();
    let mut correct = 0;
    for e in test {
        if predict_ensemble(ensemble, e.features.as_slice())? == e.label {
            correct += 1;
        }
    }
    Ok(EnsembleEvaluation {
        accuracy: accuracy_percent(correct, test.len()),
        test_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_rules() {
        let l = ClassLabel;
        assert_eq!(majority([l(3), l(3), l(3)]), Some(l(3)));
        assert_eq!(majority([l(1), l(2), l(1)]), Some(l(1)));
        assert_eq!(majority([l(2), l(1)]), Some(l(1)));
        assert_eq!(majority([l(5), l(4), l(5), l(4)]), Some(l(4)));
        assert_eq!(majority(std::iter::empty()), None);
    }

    #[test]
    fn cap_rejects_oversized_sets() {
        let cap = ResourceCap {
            max_training_rows: Some(10),
        };
        assert!(cap.check(10).is_ok());
        assert!(matches!(cap.check(11), Err(Error::ResourceExhausted { rows: 11, limit: 10 })));
        assert!(ResourceCap::default().check(usize::MAX).is_ok());
    }

    #[test]
    fn panics_become_errors() {
        let r: Result<()> = guarded(|| panic!("out of memory"));
        assert!(matches!(r, Err(Error::Crashed(m)) if m == "out of memory"));
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        assert!(EnsembleModel::new(vec![]).is_err());
    }
}
