//! Binary soft-margin SVM.
//!
//! Training maximizes the dual
//!
//! ```text
//! L_D(λ) = Σ λ_i − ½ Σ_i Σ_j λ_i λ_j q_i q_j K(p_i, p_j)
//! subject to 0 ≤ λ_i ≤ c,  Σ λ_i q_i = 0
//! ```
//!
//! with a pairwise coordinate-ascent (SMO) solver, and classifies with
//! `f(z) = Σ λ_i q_i K(p_i, z) + b`, predicting `+1` whenever `f(z) ≥ 0`.

mod kernel;
mod smo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kernel::{kernel_eval, KernelSpec};
pub use smo::{solve_dual, DualSolution};

/// Multipliers at or below this value are treated as exact zeros and pruned.
pub const ALPHA_PRUNE_THRESHOLD: f64 = 1e-8;

/// A finite, real-valued feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub(crate) Vec<f64>);

impl FeatureVector {
    /// Wraps `values`, rejecting NaN and infinite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(position) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Label of a binary example: `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryLabel {
    Positive,
    Negative,
}

impl BinaryLabel {
    pub fn sign(self) -> f64 {
        match self {
            BinaryLabel::Positive => 1.0,
            BinaryLabel::Negative => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            BinaryLabel::Positive => 1,
            BinaryLabel::Negative => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            1 => Some(BinaryLabel::Positive),
            -1 => Some(BinaryLabel::Negative),
            _ => None,
        }
    }

    /// Sign rule of the decision function: zero maps to `+1`.
    pub fn from_decision(value: f64) -> Self {
        if value >= 0.0 {
            BinaryLabel::Positive
        } else {
            BinaryLabel::Negative
        }
    }
}

/// Hyperparameters for [`train_binary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    /// Box constraint on every multiplier.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub kkt_tolerance: f64,
    /// Consecutive full passes without objective progress before giving up.
    pub max_passes: u32,
    pub kernel: KernelSpec,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            kkt_tolerance: 1e-3,
            max_passes: 10,
            kernel: KernelSpec::Linear,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParams(format!("c must be positive, got {}", self.c)));
        }
        if !(self.kkt_tolerance > 0.0 && self.kkt_tolerance.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "kkt_tolerance must be positive, got {}",
                self.kkt_tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParams("max_passes must be at least 1".into()));
        }
        self.kernel.validate()
    }
}

/// A trained binary classifier: only the support vectors are retained.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    pub(crate) support_vectors: Vec<FeatureVector>,
    pub(crate) support_labels: Vec<BinaryLabel>,
    pub(crate) alphas: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) kernel: KernelSpec,
    pub(crate) dim: usize,
}

impl BinaryModel {
    /// Assembles a model from raw parts, checking the structural invariants.
    pub fn from_parts(
        support_vectors: Vec<FeatureVector>,
        support_labels: Vec<BinaryLabel>,
        alphas: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
    ) -> Result<Self> {
        if support_vectors.is_empty() {
            return Err(Error::EmptyInput("support vectors"));
        }
        if support_vectors.len() != support_labels.len() || support_vectors.len() != alphas.len() {
            return Err(Error::InvalidParams("support vectors, labels and alphas differ in length".into()));
        }
        let dim = support_vectors[0].len();
        if let Some(sv) = support_vectors.iter().find(|sv| sv.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sv.len(),
            });
        }
        if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) || !bias.is_finite() {
            return Err(Error::InvalidParams("alphas must be positive and finite".into()));
        }
        kernel.validate()?;
        Ok(Self {
            support_vectors,
            support_labels,
            alphas,
            bias,
            kernel,
            dim,
        })
    }

    pub fn support_vectors(&self) -> &[FeatureVector] {
        &self.support_vectors
    }

    pub fn support_labels(&self) -> &[BinaryLabel] {
        &self.support_labels
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Primal weight vector `w = Σ λ_i q_i p_i`; only meaningful for the linear kernel.
    pub fn weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.dim];
        for ((sv, label), alpha) in self.support_vectors.iter().zip(&self.support_labels).zip(&self.alphas) {
            let coef = alpha * label.sign();
            for (wk, xk) in w.iter_mut().zip(sv.as_slice()) {
                *wk += coef * xk;
            }
        }
        Some(w)
    }

    pub(crate) fn decision_unchecked(&self, z: &[f64]) -> f64 {
        let mut sum = 0.0;
        for ((sv, label), alpha) in self.support_vectors.iter().zip(&self.support_labels).zip(&self.alphas) {
            sum += alpha * label.sign() * self.kernel.apply(sv.as_slice(), z);
        }
        sum + self.bias
    }
}

/// Trains a binary model on `points` with `labels`.
pub fn train_binary<P: AsRef<[f64]>>(points: &[P], labels: &[BinaryLabel], params: &TrainParams) -> Result<BinaryModel> {
    let solution = solve_dual(points, labels, params)?;
    Ok(solution.into_model(points, labels, params.kernel))
}

/// `f(z) = Σ λ_i q_i K(p_i, z) + b`.
pub fn decision_value(model: &BinaryModel, z: &[f64]) -> Result<f64> {
    if z.len() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            found: z.len(),
        });
    }
    Ok(model.decision_unchecked(z))
}

pub fn predict_binary(model: &BinaryModel, z: &[f64]) -> Result<BinaryLabel> {
    decision_value(model, z).map(BinaryLabel::from_decision)
}
