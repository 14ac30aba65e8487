//! Distributed one-vs-one multiclass SVM.
//!
//! Sites holding horizontal shards of a dataset each train a local
//! one-vs-one SVM. Every local model is scored on every other site's data,
//! the resulting accuracy matrix elects one local model as the global model,
//! and that model is broadcast back to all sites in a compact binary format.
//!
//! Module map:
//!
//! - [`svm`]: binary soft-margin SVM, SMO dual solver, decision function
//! - [`ovo`]: one-vs-one composition and vote-based prediction
//! - [`protocol`]: sites, accuracy matrix, best-per-site selection, election
//! - [`baselines`]: centralized training and ensemble voting
//! - [`data`]: CSV ingestion, horizontal partitioning, train/test splitting
//! - [`codec`]: versioned model serialization used for the broadcast
//! - [`experiment`]: configuration, method comparison and report rendering

pub mod baselines;
pub mod codec;
pub mod data;
pub mod error;
pub mod experiment;
pub mod ovo;
pub mod protocol;
pub mod svm;

pub use error::{DecodeError, Error, Result};
