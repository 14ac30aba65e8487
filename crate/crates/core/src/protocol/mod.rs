//! The distributed election protocol.
//!
//! 1. Each of the `n` sites trains a local one-vs-one model on its shard.
//! 2. Every model is scored on every other site's evaluation data, giving the
//!    accuracy matrix `A` (`A[i][j]` is model `i` on site `j`).
//! 3. For each site `j`, the foreign model with the best score in column `j`
//!    is recorded in the best table.
//! 4. The model named most often in the best table is elected as the global
//!    model and broadcast to every site.
//!
//! Ties at steps 3 and 4 go to the smallest model index. The protocol only
//! ever selects one of the local models; it never averages them.

mod election;
mod matrix;
mod site;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::serialize_model;
use crate::error::{Error, Result};
use crate::ovo::{train_ovo, OvoModel};
use crate::svm::TrainParams;

pub use election::{elect_from_matrix, elect_global_model, select_best_per_site, BestEntry, BestTable, ElectionResult, ElectionTrace};
pub use matrix::{build_accuracy_matrix, AccuracyMatrix, DIAGONAL};
pub use site::{EvalPolicy, LocalSite, Site, SiteData};

/// A site's trained model and how long training took.
#[derive(Debug, Clone)]
pub struct LocalFit {
    pub site_id: usize,
    pub model: OvoModel,
    pub train_seconds: f64,
}

/// Horizontal partitions share one feature count.
pub(crate) fn check_uniform_dim(sites: &[SiteData]) -> Result<usize> {
    let dim = sites.first().map(SiteData::dim).ok_or(Error::EmptyInput("site list"))?;
    for site in sites {
        if let Some(e) = site.examples.iter().find(|e| e.features.len() != dim) {
            return Err(Error::at_site(
                site.site_id,
                Error::DimensionMismatch {
                    expected: dim,
                    found: e.features.len(),
                },
            ));
        }
    }
    Ok(dim)
}

/// Trains one model per site, concurrently.
pub fn train_local_models(sites: &[SiteData], params: &TrainParams) -> Result<Vec<LocalFit>> {
    if sites.len() < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 sites, got {}", sites.len())));
    }
    check_uniform_dim(sites)?;
    sites
        .par_iter()
        .map(|site| {
            let start = Instant::now();
            let model = train_ovo(&site.examples, params).map_err(|e| Error::at_site(site.site_id, e))?;
            Ok(LocalFit {
                site_id: site.site_id,
                model,
                train_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Training time of the slowest site, which bounds parallel training.
pub fn parallel_training_seconds(per_site: &[f64]) -> f64 {
    per_site.iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsvmTimings {
    pub per_site_train_seconds: Vec<f64>,
    /// Max over `per_site_train_seconds`.
    pub training_seconds: f64,
    pub matrix_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastStats {
    /// Serialized size of the global model.
    pub payload_bytes: usize,
    /// Payload sent to every site except the elected one.
    pub bytes_transferred: usize,
    pub recipients: usize,
}

#[derive(Debug, Clone)]
pub struct DsvmRun {
    pub global: OvoModel,
    pub local_models: Vec<OvoModel>,
    pub election: ElectionTrace,
    pub timings: DsvmTimings,
    pub broadcast: BroadcastStats,
}

/// A set of sites running the protocol.
pub struct Federation<S: Site> {
    sites: Vec<S>,
}

impl<S: Site> Federation<S> {
    pub fn new(sites: Vec<S>) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 sites, got {}", sites.len())));
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> &[S] {
        &self.sites
    }

    pub fn into_sites(self) -> Vec<S> {
        self.sites
    }

    pub fn run(&mut self, params: &TrainParams) -> Result<DsvmRun> {
        let fits = self
            .sites
            .par_iter()
            .map(|site| {
                let start = Instant::now();
                let model = site.train(params)?;
                Ok((model, start.elapsed().as_secs_f64()))
            })
            .collect::<Result<Vec<_>>>()?;
        let (local_models, per_site): (Vec<OvoModel>, Vec<f64>) = fits.into_iter().unzip();

        let start = Instant::now();
        let matrix = AccuracyMatrix::from_fn(self.sites.len(), |i, j| self.sites[j].evaluate(&local_models[i]))?;
        let matrix_seconds = start.elapsed().as_secs_f64();

        let election = elect_from_matrix(matrix);
        let winner = election.global_model();
        let payload = serialize_model(&local_models[winner]);
        for site in &mut self.sites {
            site.receive_broadcast(&payload)?;
        }
        let recipients = self.sites.len() - 1;

        Ok(DsvmRun {
            global: local_models[winner].clone(),
            election,
            timings: DsvmTimings {
                training_seconds: parallel_training_seconds(&per_site),
                per_site_train_seconds: per_site,
                matrix_seconds,
            },
            broadcast: BroadcastStats {
                payload_bytes: payload.len(),
                bytes_transferred: payload.len() * recipients,
                recipients,
            },
            local_models,
        })
    }
}

/// Runs the whole protocol on in-process sites.
pub fn run_dsvm(sites: Vec<SiteData>, params: &TrainParams, eval_policy: EvalPolicy) -> Result<(DsvmRun, Vec<LocalSite>)> {
    check_uniform_dim(&sites)?;
    let local = sites
        .into_iter()
        .map(|s| LocalSite::new(s, eval_policy))
        .collect::<Result<Vec<_>>>()?;
    let mut federation = Federation::new(local)?;
    let run = federation.run(params)?;
    Ok((run, federation.into_sites()))
}
