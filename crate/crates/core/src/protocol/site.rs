use serde::{Deserialize, Serialize};

use crate::codec::deserialize_model;
use crate::data::train_test_split;
use crate::error::{Error, Result};
use crate::ovo::{evaluate, train_ovo, Example, OvoModel};
use crate::svm::TrainParams;

/// One horizontal shard `X_j`, held by site `site_id` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteData {
    pub site_id: usize,
    pub examples: Vec<Example>,
}

impl SiteData {
    pub fn new(site_id: usize, examples: Vec<Example>) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::at_site(site_id, Error::EmptyInput("site shard")));
        }
        Ok(Self { site_id, examples })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.examples[0].features.len()
    }
}

/// Which local data a site uses to score foreign models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalPolicy {
    /// The site's whole shard, which is also its training data.
    #[default]
    FullLocal,
    /// A seeded fraction of the shard, reserved before local training.
    Holdout { fraction: f64, seed: u64 },
}

impl EvalPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EvalPolicy::FullLocal => Ok(()),
            EvalPolicy::Holdout { fraction, .. } if fraction > 0.0 && fraction < 1.0 => Ok(()),
            EvalPolicy::Holdout { fraction, .. } => {
                Err(Error::InvalidParams(format!("holdout fraction must be in (0, 1), got {fraction}")))
            }
        }
    }
}

/// What a participant in the protocol can do.
///
/// The in-process [`LocalSite`] is the only implementation here; a networked
/// site would implement the same four operations.
pub trait Site: Send + Sync {
    fn id(&self) -> usize;

    /// Trains the local one-vs-one model on this site's training data.
    fn train(&self, params: &TrainParams) -> Result<OvoModel>;

    /// Accuracy of a foreign model on this site's evaluation data.
    fn evaluate(&self, model: &OvoModel) -> Result<f64>;

    /// Installs the broadcast global model from its serialized form.
    fn receive_broadcast(&mut self, payload: &[u8]) -> Result<()>;

    fn global_model(&self) -> Option<&OvoModel>;
}

#[derive(Debug, Clone)]
pub struct LocalSite {
    id: usize,
    training: Vec<Example>,
    holdout: Option<Vec<Example>>,
    registry: Option<OvoModel>,
}

impl LocalSite {
    pub fn new(data: SiteData, policy: EvalPolicy) -> Result<Self> {
        policy.validate()?;
        let id = data.site_id;
        let (training, holdout) = match policy {
            EvalPolicy::FullLocal => (data.examples, None),
            EvalPolicy::Holdout { fraction, seed } => {
                let len = data.examples.len();
                let k = ((fraction * len as f64).round() as usize).clamp(1, len.saturating_sub(1).max(1));
                let (train, held) = train_test_split(&data.examples, k, seed.wrapping_add(id as u64)).map_err(|e| Error::at_site(id, e))?;
                (train, Some(held))
            }
        };
        Ok(Self {
            id,
            training,
            holdout,
            registry: None,
        })
    }

    pub fn training_data(&self) -> &[Example] {
        &self.training
    }

    pub fn evaluation_data(&self) -> &[Example] {
        self.holdout.as_deref().unwrap_or(&self.training)
    }
}

impl Site for LocalSite {
    fn id(&self) -> usize {
        self.id
    }

    fn train(&self, params: &TrainParams) -> Result<OvoModel> {
        train_ovo(&self.training, params).map_err(|e| Error::at_site(self.id, e))
    }

    fn evaluate(&self, model: &OvoModel) -> Result<f64> {
        evaluate(model, self.evaluation_data()).map_err(|e| Error::at_site(self.id, e))
    }

    fn receive_broadcast(&mut self, payload: &[u8]) -> Result<()> {
        self.registry = Some(deserialize_model(payload).map_err(|e| Error::at_site(self.id, e))?);
        Ok(())
    }

    fn global_model(&self) -> Option<&OvoModel> {
        self.registry.as_ref()
    }
}
