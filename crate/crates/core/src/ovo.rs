//! One-vs-one multiclass composition.
//!
//! For `N` classes, one binary model is trained per unordered pair on that
//! pair's examples only. At prediction time every pair casts one hard vote
//! and the class with the most votes wins.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::{train_binary, BinaryLabel, BinaryModel, FeatureVector, TrainParams};

/// Class identifier; external names live in the dataset schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub usize);

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A labeled multiclass example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: FeatureVector,
    pub label: ClassLabel,
}

impl Example {
    pub fn new(features: FeatureVector, label: ClassLabel) -> Self {
        Self { features, label }
    }
}

/// Binary model for the class pair at positions `(first, second)`, `first < second`.
///
/// The class at `first` is encoded `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairModel {
    pub first: usize,
    pub second: usize,
    pub model: BinaryModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OvoModel {
    pub(crate) classes: Vec<ClassLabel>,
    pub(crate) class_names: Vec<String>,
    pub(crate) pairs: Vec<PairModel>,
    pub(crate) params: TrainParams,
    pub(crate) dim: usize,
}

impl OvoModel {
    pub fn from_parts(
        classes: Vec<ClassLabel>,
        class_names: Vec<String>,
        pairs: Vec<PairModel>,
        params: TrainParams,
        dim: usize,
    ) -> Result<Self> {
        let n = classes.len();
        if n < 2 {
            return Err(Error::TooFewClasses { found: n });
        }
        if class_names.len() != n {
            return Err(Error::Schema(format!("{} class names for {n} classes", class_names.len())));
        }
        if pairs.len() != pair_count(n) {
            return Err(Error::InvalidParams(format!(
                "{} pair models for {n} classes, expected {}",
                pairs.len(),
                pair_count(n)
            )));
        }
        let mut expected = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        for p in &pairs {
            if Some((p.first, p.second)) != expected.next() {
                return Err(Error::InvalidParams(format!("pair ({}, {}) out of order", p.first, p.second)));
            }
            if p.model.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.model.dim(),
                });
            }
        }
        Ok(Self {
            classes,
            class_names,
            pairs,
            params,
            dim,
        })
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Replaces the external names using a schema-wide name table indexed by label.
    pub fn set_class_names(&mut self, names: &[String]) {
        for (slot, label) in self.class_names.iter_mut().zip(&self.classes) {
            if let Some(name) = names.get(label.0) {
                slot.clone_from(name);
            }
        }
    }

    pub fn pairs(&self) -> &[PairModel] {
        &self.pairs
    }

    pub fn params(&self) -> &TrainParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of retained support vectors across all pairs.
    pub fn support_vector_count(&self) -> usize {
        self.pairs.iter().map(|p| p.model.support_vectors().len()).sum()
    }
}

/// `N(N − 1) / 2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Trains on every class present in `data`, ordered by label value.
pub fn train_ovo(data: &[Example], params: &TrainParams) -> Result<OvoModel> {
    let mut classes: Vec<ClassLabel> = data.iter().map(|e| e.label).collect();
    classes.sort_unstable();
    classes.dedup();
    train_ovo_with_classes(data, &classes, params)
}

/// Trains with an explicit class ordering.
///
/// The ordering fixes pair orientation (earlier class is `+1`) and the vote
/// tie rule. Every listed class must have at least one example.
pub fn train_ovo_with_classes(data: &[Example], classes: &[ClassLabel], params: &TrainParams) -> Result<OvoModel> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("multiclass training set"));
    }
    let mut sorted = classes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != classes.len() {
        return Err(Error::Schema("duplicate class in class list".into()));
    }
    if classes.len() < 2 {
        return Err(Error::TooFewClasses { found: classes.len() });
    }
    let dim = data[0].features.len();
    if let Some(e) = data.iter().find(|e| e.features.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: e.features.len(),
        });
    }
    let position = |label: ClassLabel| classes.iter().position(|c| *c == label);
    let mut by_class: Vec<Vec<&Example>> = vec![Vec::new(); classes.len()];
    for e in data {
        match position(e.label) {
            Some(p) => by_class[p].push(e),
            None => return Err(Error::Schema(format!("example label {} not in class list", e.label))),
        }
    }
    if let Some(empty) = by_class.iter().position(Vec::is_empty) {
        return Err(Error::MissingClass { class: classes[empty].0 });
    }

    let n = classes.len();
    let pair_index: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let pairs = pair_index
        .par_iter()
        .map(|&(a, b)| {
            // keep the original data order within the pair
            let mut points: Vec<&FeatureVector> = Vec::with_capacity(by_class[a].len() + by_class[b].len());
            let mut labels = Vec::with_capacity(points.capacity());
            for e in data {
                if e.label == classes[a] {
                    points.push(&e.features);
                    labels.push(BinaryLabel::Positive);
                } else if e.label == classes[b] {
                    points.push(&e.features);
                    labels.push(BinaryLabel::Negative);
                }
            }
            train_binary(&points, &labels, params).map(|model| PairModel {
                first: a,
                second: b,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(OvoModel {
        classes: classes.to_vec(),
        class_names: classes.iter().map(|c| c.to_string()).collect(),
        pairs,
        params: *params,
        dim,
    })
}

/// Vote count per class position.
pub fn votes(model: &OvoModel, z: &[f64]) -> Result<Vec<usize>> {
    if z.len() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            found: z.len(),
        });
    }
    let mut counts = vec![0usize; model.classes.len()];
    for pair in &model.pairs {
        match BinaryLabel::from_decision(pair.model.decision_unchecked(z)) {
            BinaryLabel::Positive => counts[pair.first] += 1,
            BinaryLabel::Negative => counts[pair.second] += 1,
        }
    }
    Ok(counts)
}

/// Position of the first maximum, so ties go to the earliest entry.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (idx, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = idx;
        }
    }
    best
}

pub fn predict_ovo(model: &OvoModel, z: &[f64]) -> Result<ClassLabel> {
    let counts = votes(model, z)?;
    Ok(model.classes[argmax_first(&counts)])
}

/// Percentage of `test` examples classified correctly.
pub fn evaluate(model: &OvoModel, test: &[Example]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    let mut correct = 0usize;
    for e in test {
        if predict_ovo(model, e.features.as_slice())? == e.label {
            correct += 1;
        }
    }
    Ok(accuracy_percent(correct, test.len()))
}

pub(crate) fn accuracy_percent(correct: usize, total: usize) -> f64 {
    100.0 * correct as f64 / total as f64
}
